#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cenprobe/dns.hpp"
#include "cenprobe/http_engine.hpp"
#include "cenprobe/sni_probe.hpp"
#include "cenprobe/tcp_probe.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe::jsonl {

/// One resolution as stored on disk: (domain, channel) plus the outcome.
/// Deliberately carries no clock reading so that replays and reruns of the
/// same scenario produce identical bytes.
struct DnsLineRecord {
    std::string domain;
    std::string channel;
    bool is_control = false;
    DnsOutcome outcome;
};

// Each record type serializes to a single self-describing JSON line
// ({"type": "dns", ...}); see docs/formats.md.
std::string to_line(const DnsLineRecord& rec);
std::string to_line(const HttpFetchRecord& rec);
std::string to_line(const TcpProbeRecord& rec);
std::string to_line(const SniProbeRecord& rec);
std::string to_line(const ProbeVerdict& rec);

std::optional<DnsLineRecord> dns_from_line(const std::string& line);
std::optional<HttpFetchRecord> http_from_line(const std::string& line);
std::optional<TcpProbeRecord> tcp_from_line(const std::string& line);
std::optional<SniProbeRecord> sni_from_line(const std::string& line);
std::optional<ProbeVerdict> verdict_from_line(const std::string& line);

/// Non-blank lines of a JSONL file. Throws std::runtime_error when the file
/// cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace cenprobe::jsonl
