#include "cenprobe/runconfig.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cenprobe {

namespace {

bool needs_scenario(const std::string& sub) {
    return sub == "probe-dns" || sub == "probe-tcp" || sub == "probe-http" ||
           sub == "probe-sni" || sub == "simulate" || sub == "full";
}

}  // namespace

std::vector<std::string> validate_config(const RunConfig& cfg, const std::string& subcommand) {
    std::vector<std::string> errors;

    if (cfg.sigma_mult <= 0.0) errors.push_back("sigma_mult must be > 0");
    if (cfg.sigma_floor_dns <= 0.0) errors.push_back("sigma_floor_dns must be > 0");
    if (cfg.sigma_floor_len <= 0.0) errors.push_back("sigma_floor_len must be > 0");
    if (cfg.sigma_floor_cos <= 0.0) errors.push_back("sigma_floor_cos must be > 0");
    if (cfg.corpus_format != "plain" && cfg.corpus_format != "csv")
        errors.push_back("corpus_format must be plain or csv");
    if (cfg.report_format != "json" && cfg.report_format != "csv")
        errors.push_back("report_format must be json or csv");
    if (cfg.ip_cap == 0) errors.push_back("ip_cap must be >= 1");
    if (cfg.tcp_ports.empty()) errors.push_back("tcp_ports must not be empty");

    if (subcommand == "ingest" && cfg.corpus_path.empty())
        errors.push_back("ingest requires a corpus path");
    if (needs_scenario(subcommand) && cfg.scenario_path.empty())
        errors.push_back(subcommand + " requires a scenario path");

    if ((subcommand == "probe-dns" || subcommand == "full") && cfg.control_resolvers < 2)
        errors.push_back("dns probing requires at least 2 control channels");
    if ((subcommand == "probe-http" || subcommand == "full") && cfg.control_vantages < 2)
        errors.push_back("http probing requires at least 2 control vantages");
    if ((subcommand == "probe-tcp" || subcommand == "probe-sni") && cfg.control_vantages < 1)
        errors.push_back(subcommand + " requires at least 1 control vantage");

    return errors;
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config file " + path + ": not a JSON object");

    try {
        if (j.contains("corpus_path")) cfg.corpus_path = j["corpus_path"].get<std::string>();
        if (j.contains("corpus_format"))
            cfg.corpus_format = j["corpus_format"].get<std::string>();
        if (j.contains("scenario_path"))
            cfg.scenario_path = j["scenario_path"].get<std::string>();
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("isp")) cfg.isp = j["isp"].get<std::string>();
        if (j.contains("signatures_path"))
            cfg.signatures_path = j["signatures_path"].get<std::string>();
        if (j.contains("bogons_path")) cfg.bogons_path = j["bogons_path"].get<std::string>();
        if (j.contains("report_format"))
            cfg.report_format = j["report_format"].get<std::string>();

        if (j.contains("sigma_mult")) cfg.sigma_mult = j["sigma_mult"].get<double>();
        if (j.contains("sigma_floor_dns"))
            cfg.sigma_floor_dns = j["sigma_floor_dns"].get<double>();
        if (j.contains("sigma_floor_len"))
            cfg.sigma_floor_len = j["sigma_floor_len"].get<double>();
        if (j.contains("sigma_floor_cos"))
            cfg.sigma_floor_cos = j["sigma_floor_cos"].get<double>();
        if (j.contains("min_dprime")) cfg.min_dprime = j["min_dprime"].get<std::size_t>();

        if (j.contains("tcp_retries")) cfg.tcp_retries = j["tcp_retries"].get<std::size_t>();
        if (j.contains("tcp_retry_delay_ms"))
            cfg.tcp_retry_delay = std::chrono::milliseconds(j["tcp_retry_delay_ms"].get<long>());
        if (j.contains("connect_timeout_ms"))
            cfg.connect_timeout = std::chrono::milliseconds(j["connect_timeout_ms"].get<long>());
        if (j.contains("dns_timeout_ms"))
            cfg.dns_timeout = std::chrono::milliseconds(j["dns_timeout_ms"].get<long>());
        if (j.contains("http_timeout_ms"))
            cfg.http_timeout = std::chrono::milliseconds(j["http_timeout_ms"].get<long>());
        if (j.contains("sni_attempts"))
            cfg.sni_attempts = j["sni_attempts"].get<std::size_t>();

        if (j.contains("control_resolvers"))
            cfg.control_resolvers = j["control_resolvers"].get<std::size_t>();
        if (j.contains("control_vantages"))
            cfg.control_vantages = j["control_vantages"].get<std::size_t>();
        if (j.contains("max_jitter")) cfg.max_jitter = j["max_jitter"].get<std::size_t>();

        if (j.contains("ip_cap")) cfg.ip_cap = j["ip_cap"].get<std::size_t>();
        if (j.contains("tcp_ports")) {
            cfg.tcp_ports.clear();
            for (const auto& p : j["tcp_ports"])
                cfg.tcp_ports.push_back(p.get<std::uint16_t>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("config file " + path + ": " + e.what());
    }
}

void apply_env(RunConfig& cfg) {
    if (const char* out = std::getenv("CENPROBE_OUT"); out && *out) cfg.output_dir = out;
}

DnsAnalysisConfig dns_analysis_config(const RunConfig& cfg) {
    DnsAnalysisConfig out;
    out.sigma_mult = cfg.sigma_mult;
    out.sigma_floor = cfg.sigma_floor_dns;
    out.min_dprime = cfg.min_dprime;
    return out;
}

HttpAnalysisConfig http_analysis_config(const RunConfig& cfg) {
    HttpAnalysisConfig out;
    out.sigma_mult = cfg.sigma_mult;
    out.len_sigma_floor = cfg.sigma_floor_len;
    out.cos_sigma_floor = cfg.sigma_floor_cos;
    return out;
}

HttpFetchConfig http_fetch_config(const RunConfig& cfg) {
    HttpFetchConfig out;
    out.timeout = cfg.http_timeout;
    return out;
}

TcpProbeConfig tcp_probe_config(const RunConfig& cfg) {
    TcpProbeConfig out;
    out.retries = static_cast<int>(cfg.tcp_retries);
    out.retry_delay = cfg.tcp_retry_delay;
    out.connect_timeout = cfg.connect_timeout;
    return out;
}

SniProbeConfig sni_probe_config(const RunConfig& cfg) {
    SniProbeConfig out;
    out.attempts = static_cast<int>(cfg.sni_attempts);
    out.timeout = cfg.connect_timeout;
    return out;
}

sim::SimNetworkConfig sim_network_config(const RunConfig& cfg) {
    sim::SimNetworkConfig out;
    out.control_resolvers = cfg.control_resolvers;
    out.control_vantages = cfg.control_vantages;
    out.max_jitter = cfg.max_jitter;
    return out;
}

}  // namespace cenprobe
