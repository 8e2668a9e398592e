#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cenprobe/types.hpp"

namespace cenprobe::dns {

enum class OutcomeKind { answers, error, timeout };

enum class RCode { nxdomain, servfail, refused, other };

std::string_view to_string(OutcomeKind k);
std::string_view to_string(RCode c);

/// One resolution attempt's outcome on one channel.
struct DnsOutcome {
    OutcomeKind kind = OutcomeKind::timeout;
    // Non-empty iff kind == answers. Wire order is preserved (deduplicated);
    // the first-listed address feeds the MRF sample.
    std::vector<Ipv4> ips;
    std::optional<RCode> error_code;  // set iff kind == error
    std::optional<std::uint32_t> min_ttl;

    static DnsOutcome answers(std::vector<Ipv4> ips, std::optional<std::uint32_t> ttl = {});
    static DnsOutcome error(RCode code);
    static DnsOutcome timeout();

    bool has_answers() const { return kind == OutcomeKind::answers; }
    bool contains(const Ipv4& ip) const;
};

struct DnsObservation {
    Domain domain;
    std::string channel;
    DnsOutcome outcome;
    std::chrono::system_clock::time_point timestamp;
};

/// Union of answer IPs across all control channels for one domain.
struct ControlIpSet {
    Domain domain;
    std::set<Ipv4> ips;
};

/// Relative frequency of the most frequent IP within one channel's answers.
struct MrfStat {
    std::string channel;
    Ipv4 most_frequent_ip;
    double mrf = 0.0;      // in (0, 1]
    size_t sample_size = 0;
};

}  // namespace cenprobe::dns

namespace cenprobe {
using dns::ControlIpSet;
using dns::DnsObservation;
using dns::DnsOutcome;
using dns::MrfStat;
using dns::OutcomeKind;
using dns::RCode;
}  // namespace cenprobe
