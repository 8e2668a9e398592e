#include "cenprobe/sim/scenario.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cenprobe::sim {

using nlohmann::json;

std::string_view to_string(DnsRule::Action a) {
    switch (a) {
        case DnsRule::Action::nxdomain: return "nxdomain";
        case DnsRule::Action::servfail: return "servfail";
        case DnsRule::Action::refused: return "refused";
        case DnsRule::Action::bogon: return "bogon";
        case DnsRule::Action::inject: return "inject";
        case DnsRule::Action::timeout: return "timeout";
    }
    return "nxdomain";
}

std::string_view to_string(HttpRule::Action a) {
    switch (a) {
        case HttpRule::Action::rst: return "rst";
        case HttpRule::Action::blockpage: return "blockpage";
        case HttpRule::Action::redirect: return "redirect";
        case HttpRule::Action::error: return "error";
        case HttpRule::Action::timeout: return "timeout";
    }
    return "rst";
}

std::string_view to_string(TcpRule::Action a) {
    return a == TcpRule::Action::refuse ? "refuse" : "drop";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error("scenario: " + path + ": " + what);
}

std::string require_string(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key)) fail(path + "." + key, "missing");
    if (!j[key].is_string()) fail(path + "." + key, "expected string");
    return j[key].get<std::string>();
}

void check_domain(const std::string& name, const std::string& path) {
    if (!Domain::parse(name)) fail(path, "not a valid domain name: '" + name + "'");
}

void check_ip(const std::string& s, const std::string& path) {
    if (!Ipv4::parse(s)) fail(path, "not a valid IPv4 address: '" + s + "'");
}

DnsRule::Action dns_action(const std::string& s, const std::string& path) {
    if (s == "nxdomain") return DnsRule::Action::nxdomain;
    if (s == "servfail") return DnsRule::Action::servfail;
    if (s == "refused") return DnsRule::Action::refused;
    if (s == "bogon") return DnsRule::Action::bogon;
    if (s == "inject") return DnsRule::Action::inject;
    if (s == "timeout") return DnsRule::Action::timeout;
    fail(path, "unknown action '" + s + "'");
}

HttpRule::Action http_action(const std::string& s, const std::string& path) {
    if (s == "rst") return HttpRule::Action::rst;
    if (s == "blockpage") return HttpRule::Action::blockpage;
    if (s == "redirect") return HttpRule::Action::redirect;
    if (s == "error") return HttpRule::Action::error;
    if (s == "timeout") return HttpRule::Action::timeout;
    fail(path, "unknown action '" + s + "'");
}

TcpRule::Action tcp_action(const std::string& s, const std::string& path) {
    if (s == "drop") return TcpRule::Action::drop;
    if (s == "refuse") return TcpRule::Action::refuse;
    fail(path, "unknown action '" + s + "'");
}

Scenario parse(const json& j) {
    if (!j.is_object()) fail("$", "top level must be an object");
    Scenario sc;
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
            fail("seed", "expected integer");
        sc.seed = j["seed"].get<std::uint64_t>();
    }

    if (j.contains("origins")) {
        if (!j["origins"].is_object()) fail("origins", "expected object");
        for (const auto& [domain, spec] : j["origins"].items()) {
            std::string path = "origins." + domain;
            check_domain(domain, path);
            if (!spec.is_object()) fail(path, "expected object");
            OriginSpec os;
            if (spec.contains("ip")) {
                os.ip = spec["ip"].get<std::string>();
                check_ip(os.ip, path + ".ip");
            }
            if (spec.contains("status")) {
                if (!spec["status"].is_number_integer()) fail(path + ".status", "expected integer");
                os.status = spec["status"].get<int>();
                if (os.status < 100 || os.status > 599)
                    fail(path + ".status", "out of range");
            }
            if (spec.contains("body")) os.body = spec["body"].get<std::string>();
            if (spec.contains("redirect")) os.redirect = spec["redirect"].get<std::string>();
            if (spec.contains("headers")) {
                if (!spec["headers"].is_object()) fail(path + ".headers", "expected object");
                for (const auto& [k, v] : spec["headers"].items())
                    os.headers[k] = v.get<std::string>();
            }
            if (os.status / 100 == 3 && os.redirect.empty())
                fail(path, "3xx origin needs a redirect target");
            sc.origins[domain] = std::move(os);
        }
    }

    if (j.contains("dns_rules")) {
        if (!j["dns_rules"].is_object()) fail("dns_rules", "expected object");
        for (const auto& [domain, spec] : j["dns_rules"].items()) {
            std::string path = "dns_rules." + domain;
            check_domain(domain, path);
            DnsRule rule;
            rule.action = dns_action(require_string(spec, path, "action"), path + ".action");
            if (rule.action == DnsRule::Action::bogon || rule.action == DnsRule::Action::inject) {
                rule.ip = require_string(spec, path, "ip");
                check_ip(rule.ip, path + ".ip");
            }
            sc.dns_rules[domain] = std::move(rule);
        }
    }

    if (j.contains("http_rules")) {
        if (!j["http_rules"].is_object()) fail("http_rules", "expected object");
        for (const auto& [domain, spec] : j["http_rules"].items()) {
            std::string path = "http_rules." + domain;
            check_domain(domain, path);
            HttpRule rule;
            rule.action = http_action(require_string(spec, path, "action"), path + ".action");
            if (rule.action == HttpRule::Action::redirect)
                rule.target = require_string(spec, path, "target");
            if (spec.contains("status")) {
                if (!spec["status"].is_number_integer()) fail(path + ".status", "expected integer");
                rule.status = spec["status"].get<int>();
            }
            if (spec.contains("body")) rule.body = spec["body"].get<std::string>();
            sc.http_rules[domain] = std::move(rule);
        }
    }

    if (j.contains("sni_blocklist")) {
        if (!j["sni_blocklist"].is_array()) fail("sni_blocklist", "expected array");
        size_t i = 0;
        for (const auto& item : j["sni_blocklist"]) {
            std::string path = "sni_blocklist[" + std::to_string(i++) + "]";
            if (!item.is_string()) fail(path, "expected string");
            std::string name = item.get<std::string>();
            check_domain(name, path);
            sc.sni_blocklist.insert(name);
        }
    }

    if (j.contains("tcp_rules")) {
        if (!j["tcp_rules"].is_object()) fail("tcp_rules", "expected object");
        for (const auto& [domain, spec] : j["tcp_rules"].items()) {
            std::string path = "tcp_rules." + domain;
            check_domain(domain, path);
            TcpRule rule;
            rule.action = tcp_action(require_string(spec, path, "action"), path + ".action");
            if (spec.contains("port")) {
                int p = spec["port"].get<int>();
                if (p < 0 || p > 65535) fail(path + ".port", "out of range");
                rule.port = static_cast<std::uint16_t>(p);
            }
            sc.tcp_rules[domain] = std::move(rule);
        }
    }

    // Every censor rule must point at something the emulated web serves;
    // otherwise the probe side could never distinguish the rule from noise.
    for (const auto& [d, r] : sc.http_rules)
        if (!sc.origins.count(d)) fail("http_rules." + d, "no such origin");
    for (const auto& [d, r] : sc.tcp_rules)
        if (!sc.origins.count(d)) fail("tcp_rules." + d, "no such origin");

    return sc;
}

}  // namespace

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("scenario: cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("scenario: " + path + ": " + e.what());
    }
    return parse(j);
}

Scenario parse_scenario_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("scenario: ") + e.what());
    }
    return parse(j);
}

}  // namespace cenprobe::sim
