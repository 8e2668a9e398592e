#include "cenprobe/jsonl.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "cenprobe/strings.hpp"
#include "cenprobe/tls_util.hpp"

namespace cenprobe::jsonl {

using nlohmann::ordered_json;

namespace {

ordered_json outcome_to_json(const DnsOutcome& o) {
    ordered_json j;
    j["outcome"] = std::string(to_string(o.kind));
    if (o.kind == OutcomeKind::answers) {
        ordered_json ips = ordered_json::array();
        for (const Ipv4& ip : o.ips) ips.push_back(ip.to_string());
        j["ips"] = std::move(ips);
        if (o.min_ttl) j["ttl"] = *o.min_ttl;
    }
    if (o.kind == OutcomeKind::error)
        j["rcode"] = std::string(to_string(o.error_code.value_or(RCode::other)));
    return j;
}

std::optional<DnsOutcome> outcome_from_json(const nlohmann::json& j) {
    std::string kind = j.at("outcome").get<std::string>();
    if (kind == "timeout") return DnsOutcome::timeout();
    if (kind == "error") {
        std::string rc = j.value("rcode", "other");
        RCode code = RCode::other;
        for (RCode c : {RCode::nxdomain, RCode::servfail, RCode::refused})
            if (rc == to_string(c)) code = c;
        return DnsOutcome::error(code);
    }
    if (kind == "answers") {
        std::vector<Ipv4> ips;
        for (const auto& s : j.at("ips")) {
            auto ip = Ipv4::parse(s.get<std::string>());
            if (!ip) return std::nullopt;
            ips.push_back(*ip);
        }
        std::optional<std::uint32_t> ttl;
        if (j.contains("ttl")) ttl = j["ttl"].get<std::uint32_t>();
        return DnsOutcome::answers(std::move(ips), ttl);
    }
    return std::nullopt;
}

std::optional<net::ConnectStatus> connect_status_from_string(const std::string& s) {
    if (s == "ok") return net::ConnectStatus::ok;
    if (s == "refused") return net::ConnectStatus::refused;
    if (s == "timeout") return net::ConnectStatus::timeout;
    if (s == "unreachable") return net::ConnectStatus::unreachable;
    if (s == "error") return net::ConnectStatus::error;
    return std::nullopt;
}

std::optional<net::PingStatus> ping_status_from_string(const std::string& s) {
    if (s == "ok") return net::PingStatus::ok;
    if (s == "timeout") return net::PingStatus::timeout;
    if (s == "unreachable") return net::PingStatus::unreachable;
    if (s == "capability_missing") return net::PingStatus::capability_missing;
    return std::nullopt;
}

std::optional<tls::HsStatus> hs_status_from_string(const std::string& s) {
    if (s == "ok") return tls::HsStatus::ok;
    if (s == "reset") return tls::HsStatus::reset;
    if (s == "timeout") return tls::HsStatus::timeout;
    if (s == "error") return tls::HsStatus::error;
    return std::nullopt;
}

std::optional<nlohmann::json> parse_typed(const std::string& line, const char* type) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (j.value("type", "") != type) return std::nullopt;
    return j;
}

}  // namespace

std::string to_line(const DnsLineRecord& rec) {
    ordered_json j;
    j["type"] = "dns";
    j["domain"] = rec.domain;
    j["channel"] = rec.channel;
    j["is_control"] = rec.is_control;
    j.update(outcome_to_json(rec.outcome));
    return j.dump();
}

std::optional<DnsLineRecord> dns_from_line(const std::string& line) {
    auto j = parse_typed(line, "dns");
    if (!j) return std::nullopt;
    try {
        DnsLineRecord rec;
        rec.domain = j->at("domain").get<std::string>();
        rec.channel = j->at("channel").get<std::string>();
        rec.is_control = j->value("is_control", false);
        auto outcome = outcome_from_json(*j);
        if (!outcome) return std::nullopt;
        rec.outcome = *outcome;
        return rec;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::string to_line(const HttpFetchRecord& rec) {
    ordered_json j;
    j["type"] = "http";
    j["domain"] = rec.domain.name();
    j["vantage"] = rec.vantage;
    j["is_control"] = rec.is_control;
    j["fetch_status"] = std::string(to_string(rec.fetch_status));
    if (rec.fetch_status == FetchStatus::ok) {
        j["status_code"] = rec.status_code;
        j["header_keys"] = rec.header_keys;
        if (rec.redirect_location) j["redirect_location"] = *rec.redirect_location;
        j["body_length"] = rec.body_length;
        ordered_json tf = ordered_json::object();
        for (const auto& [tag, count] : rec.tag_tf) tf[tag] = count;
        j["tag_tf"] = std::move(tf);
    }
    if (!rec.matched_signature.empty()) j["matched_signature"] = rec.matched_signature;
    return j.dump();
}

std::optional<HttpFetchRecord> http_from_line(const std::string& line) {
    auto j = parse_typed(line, "http");
    if (!j) return std::nullopt;
    try {
        HttpFetchRecord rec;
        auto domain = Domain::parse(j->at("domain").get<std::string>());
        if (!domain) return std::nullopt;
        rec.domain = *domain;
        rec.vantage = j->value("vantage", "");
        rec.is_control = j->value("is_control", false);
        auto fs = fetch_status_from_string(j->at("fetch_status").get<std::string>());
        if (!fs) return std::nullopt;
        rec.fetch_status = *fs;
        if (rec.fetch_status == FetchStatus::ok) {
            rec.status_code = j->at("status_code").get<int>();
            for (const auto& k : j->value("header_keys", nlohmann::json::array()))
                rec.header_keys.push_back(k.get<std::string>());
            if (j->contains("redirect_location"))
                rec.redirect_location = (*j)["redirect_location"].get<std::string>();
            rec.body_length = j->value("body_length", std::uint64_t{0});
            if (j->contains("tag_tf"))
                for (const auto& [tag, count] : (*j)["tag_tf"].items())
                    rec.tag_tf[tag] = count.get<int>();
        }
        rec.matched_signature = j->value("matched_signature", "");
        return rec;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::string to_line(const TcpProbeRecord& rec) {
    ordered_json j;
    j["type"] = "tcp";
    j["domain"] = rec.domain.name();
    j["ip"] = rec.ip.to_string();
    j["port"] = rec.port;
    j["ping_ran"] = rec.ping_ran;
    if (rec.ping_ran) j["ping"] = std::string(net::to_string(rec.ping));
    auto attempts = [](const std::vector<net::ConnectStatus>& xs) {
        ordered_json arr = ordered_json::array();
        for (auto s : xs) arr.push_back(std::string(net::to_string(s)));
        return arr;
    };
    j["test_attempts"] = attempts(rec.test_attempts);
    j["control_attempts"] = attempts(rec.control_attempts);
    j["verdict"] = std::string(to_string(rec.verdict));
    if (!rec.evidence.empty()) j["evidence"] = rec.evidence;
    if (!rec.note.empty()) j["note"] = rec.note;
    return j.dump();
}

std::optional<TcpProbeRecord> tcp_from_line(const std::string& line) {
    auto j = parse_typed(line, "tcp");
    if (!j) return std::nullopt;
    try {
        TcpProbeRecord rec;
        auto domain = Domain::parse(j->at("domain").get<std::string>());
        auto ip = Ipv4::parse(j->at("ip").get<std::string>());
        if (!domain || !ip) return std::nullopt;
        rec.domain = *domain;
        rec.ip = *ip;
        rec.port = j->at("port").get<std::uint16_t>();
        rec.ping_ran = j->value("ping_ran", false);
        if (rec.ping_ran) {
            auto ping = ping_status_from_string(j->value("ping", "capability_missing"));
            if (!ping) return std::nullopt;
            rec.ping = *ping;
        }
        auto attempts = [](const nlohmann::json& arr,
                           std::vector<net::ConnectStatus>& out) -> bool {
            for (const auto& s : arr) {
                auto st = connect_status_from_string(s.get<std::string>());
                if (!st) return false;
                out.push_back(*st);
            }
            return true;
        };
        if (!attempts(j->value("test_attempts", nlohmann::json::array()), rec.test_attempts))
            return std::nullopt;
        if (!attempts(j->value("control_attempts", nlohmann::json::array()),
                      rec.control_attempts))
            return std::nullopt;
        auto v = verdict_from_string(j->at("verdict").get<std::string>());
        if (!v) return std::nullopt;
        rec.verdict = *v;
        rec.evidence = j->value("evidence", "");
        rec.note = j->value("note", "");
        return rec;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::string to_line(const SniProbeRecord& rec) {
    ordered_json j;
    j["type"] = "sni";
    j["domain"] = rec.domain.name();
    j["reflector_ip"] = rec.reflector_ip.to_string();
    auto attempts = [](const std::vector<SniAttempt>& xs) {
        ordered_json arr = ordered_json::array();
        for (const SniAttempt& a : xs) {
            ordered_json item;
            item["connect"] = std::string(net::to_string(a.connect));
            item["handshake"] = std::string(tls::to_string(a.handshake));
            arr.push_back(std::move(item));
        }
        return arr;
    };
    j["test_attempts"] = attempts(rec.test_attempts);
    j["control_attempts"] = attempts(rec.control_attempts);
    j["verdict"] = std::string(to_string(rec.verdict));
    if (!rec.evidence.empty()) j["evidence"] = rec.evidence;
    if (!rec.note.empty()) j["note"] = rec.note;
    return j.dump();
}

std::optional<SniProbeRecord> sni_from_line(const std::string& line) {
    auto j = parse_typed(line, "sni");
    if (!j) return std::nullopt;
    try {
        SniProbeRecord rec;
        auto domain = Domain::parse(j->at("domain").get<std::string>());
        auto ip = Ipv4::parse(j->at("reflector_ip").get<std::string>());
        if (!domain || !ip) return std::nullopt;
        rec.domain = *domain;
        rec.reflector_ip = *ip;
        auto attempts = [](const nlohmann::json& arr, std::vector<SniAttempt>& out) -> bool {
            for (const auto& item : arr) {
                SniAttempt a;
                auto c = connect_status_from_string(item.at("connect").get<std::string>());
                auto h = hs_status_from_string(item.at("handshake").get<std::string>());
                if (!c || !h) return false;
                a.connect = *c;
                a.handshake = *h;
                out.push_back(a);
            }
            return true;
        };
        if (!attempts(j->value("test_attempts", nlohmann::json::array()), rec.test_attempts))
            return std::nullopt;
        if (!attempts(j->value("control_attempts", nlohmann::json::array()),
                      rec.control_attempts))
            return std::nullopt;
        auto v = verdict_from_string(j->at("verdict").get<std::string>());
        if (!v) return std::nullopt;
        rec.verdict = *v;
        rec.evidence = j->value("evidence", "");
        rec.note = j->value("note", "");
        return rec;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::string to_line(const ProbeVerdict& rec) {
    ordered_json j;
    j["type"] = "verdict";
    j["domain"] = rec.domain;
    j["technique"] = rec.technique;
    j["verdict"] = std::string(to_string(rec.verdict));
    if (!rec.evidence.empty()) j["evidence"] = rec.evidence;
    if (!rec.note.empty()) j["note"] = rec.note;
    if (rec.matched_signature) j["matched_signature"] = *rec.matched_signature;
    if (rec.ip) j["ip"] = *rec.ip;
    return j.dump();
}

std::optional<ProbeVerdict> verdict_from_line(const std::string& line) {
    auto j = parse_typed(line, "verdict");
    if (!j) return std::nullopt;
    try {
        ProbeVerdict rec;
        rec.domain = j->at("domain").get<std::string>();
        rec.technique = j->at("technique").get<std::string>();
        auto v = verdict_from_string(j->at("verdict").get<std::string>());
        if (!v) return std::nullopt;
        rec.verdict = *v;
        rec.evidence = j->value("evidence", "");
        rec.note = j->value("note", "");
        if (j->contains("matched_signature"))
            rec.matched_signature = (*j)["matched_signature"].get<std::string>();
        if (j->contains("ip")) rec.ip = (*j)["ip"].get<std::string>();
        return rec;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        std::string t = strings::trim(line);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

}  // namespace cenprobe::jsonl
