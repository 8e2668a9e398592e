#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cenprobe/dns_engine.hpp"
#include "cenprobe/http_engine.hpp"
#include "cenprobe/sim/sim_network.hpp"
#include "cenprobe/sni_probe.hpp"
#include "cenprobe/tcp_probe.hpp"

namespace cenprobe {

/// Everything a run can be tuned with. Defaults are the measurement
/// methodology's published constants; tests shrink the delays.
struct RunConfig {
    std::string corpus_path;
    std::string corpus_format = "plain";  // plain | csv
    std::string scenario_path;
    std::string output_dir = "out";
    std::string isp = "test";  // identifier of the network under test
    std::string signatures_path;
    std::string bogons_path;
    std::string report_format = "json";  // json | csv

    double sigma_mult = 3.0;
    double sigma_floor_dns = 0.01;
    double sigma_floor_len = 1.0;
    double sigma_floor_cos = 0.01;
    std::size_t min_dprime = 20;

    std::size_t tcp_retries = 5;
    std::chrono::milliseconds tcp_retry_delay{100'000};
    std::chrono::milliseconds connect_timeout{10'000};
    std::chrono::milliseconds dns_timeout{5'000};
    std::chrono::milliseconds http_timeout{30'000};
    std::size_t sni_attempts = 3;

    std::size_t control_resolvers = 5;
    std::size_t control_vantages = 3;
    std::size_t max_jitter = 3;

    std::size_t ip_cap = 3;  // addresses probed per domain
    std::vector<std::uint16_t> tcp_ports{80, 443};
};

/// Problems that make the config unusable for `subcommand`; empty means ok.
std::vector<std::string> validate_config(const RunConfig& cfg, const std::string& subcommand);

/// JSON config file; keys mirror the field names, durations take a `_ms`
/// suffix. Values present in the file override whatever is already set, so
/// the file wins over flags. Throws std::runtime_error on unreadable or
/// malformed input.
void apply_config_file(RunConfig& cfg, const std::string& path);

/// CENPROBE_OUT overrides the output directory; no other setting is
/// environment-sensitive.
void apply_env(RunConfig& cfg);

DnsAnalysisConfig dns_analysis_config(const RunConfig& cfg);
HttpAnalysisConfig http_analysis_config(const RunConfig& cfg);
HttpFetchConfig http_fetch_config(const RunConfig& cfg);
TcpProbeConfig tcp_probe_config(const RunConfig& cfg);
SniProbeConfig sni_probe_config(const RunConfig& cfg);
sim::SimNetworkConfig sim_network_config(const RunConfig& cfg);

}  // namespace cenprobe
