#pragma once

#include <map>
#include <string>
#include <vector>

#include "cenprobe/dns_engine.hpp"
#include "cenprobe/http_engine.hpp"
#include "cenprobe/jsonl.hpp"
#include "cenprobe/report.hpp"
#include "cenprobe/runconfig.hpp"
#include "cenprobe/sim/sim_network.hpp"
#include "cenprobe/sni_probe.hpp"
#include "cenprobe/tcp_probe.hpp"

namespace cenprobe::pipeline {

struct OutputPaths {
    std::string dir;
    std::string dns_records;
    std::string tcp_records;
    std::string http_records;
    std::string sni_records;
    std::string verdicts;
    std::string report_json;
    std::string summary_csv;
    std::string frequency_csv;
    std::string verdicts_csv;
    std::string domains_txt;
    std::string sources_json;
};
OutputPaths make_output_paths(const std::string& dir);

/// mkdir -p; throws std::runtime_error on failure.
void ensure_dir(const std::string& dir);
void write_text_file(const std::string& path, const std::string& content);
void write_jsonl(const std::string& path, const std::vector<std::string>& lines);
/// Probe records accumulate across runs; analysis takes the newest line per
/// key.
void append_jsonl(const std::string& path, const std::vector<std::string>& lines);

/// Every domain the scenario mentions anywhere, sorted. This is the probe
/// set for scenario-driven runs.
std::vector<Domain> scenario_probe_set(const sim::Scenario& scenario);

struct DnsStageResult {
    std::vector<jsonl::DnsLineRecord> records;
    DnsAnalysisResult analysis;
    std::vector<IpFrequencyRow> test_frequency;
    // Control-resolved addresses per domain (sorted, deduplicated); the
    // address targets for the connect-level stages.
    std::map<std::string, std::vector<Ipv4>> control_ips;
};

/// Control-channel resolution only — address targets for a standalone tcp or
/// http stage that has no DNS stage in front of it.
std::map<std::string, std::vector<Ipv4>> control_targets(sim::SimNetwork& net,
                                                          const std::vector<Domain>& domains,
                                                          const RunConfig& cfg);
DnsStageResult run_dns_stage(sim::SimNetwork& net, const std::vector<Domain>& domains,
                             const RunConfig& cfg);
/// Same analysis, replayed from stored records.
DnsStageResult analyze_dns_records(const std::vector<jsonl::DnsLineRecord>& records,
                                   const RunConfig& cfg);

struct TcpStageResult {
    std::vector<TcpProbeRecord> records;
    std::vector<ProbeVerdict> verdicts;  // one per domain
};
TcpStageResult run_tcp_stage(sim::SimNetwork& net, const std::vector<Domain>& domains,
                             const std::map<std::string, std::vector<Ipv4>>& targets,
                             const RunConfig& cfg, const SleepFn& sleep = {});
TcpStageResult analyze_tcp_records(std::vector<TcpProbeRecord> records);

struct HttpStageResult {
    std::vector<HttpFetchRecord> records;
    std::vector<ProbeVerdict> verdicts;  // one per domain
    std::map<std::string, std::string> signatures_matched;
};
HttpStageResult run_http_stage(sim::SimNetwork& net, const std::vector<Domain>& domains,
                               const std::map<std::string, std::vector<Ipv4>>& targets,
                               const RunConfig& cfg);
HttpStageResult analyze_http_records(const std::vector<HttpFetchRecord>& records,
                                     const RunConfig& cfg);

struct SniStageResult {
    std::vector<SniProbeRecord> records;
    std::vector<ProbeVerdict> verdicts;  // one per domain
};
SniStageResult run_sni_stage(sim::SimNetwork& net, const std::vector<Domain>& domains,
                             const RunConfig& cfg);
SniStageResult analyze_sni_records(std::vector<SniProbeRecord> records);

struct FullRunResult {
    RunReport report;
    bool any_untestable = false;
};

/// The whole measurement: bring up the scenario network, run every probe
/// stage, analyze, and write records plus the report under cfg.output_dir.
/// Stage records are flushed as each stage completes. Throws
/// std::runtime_error when the network cannot start or files cannot be
/// written.
FullRunResult run_full(const sim::Scenario& scenario, const RunConfig& cfg);

/// Re-runs analysis from the JSONL records a previous run stored in
/// cfg.output_dir and rewrites the derived outputs. Deterministic: identical
/// records yield byte-identical reports. Throws std::runtime_error when no
/// records are found.
FullRunResult analyze_stored(const RunConfig& cfg);

}  // namespace cenprobe::pipeline
