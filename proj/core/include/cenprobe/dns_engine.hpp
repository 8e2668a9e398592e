#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cenprobe/bogon.hpp"
#include "cenprobe/dns.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe {

/// One domain's resolutions: the answer seen from the vantage under test plus
/// the answer from each control channel.
struct DomainDnsData {
    Domain domain;
    DnsOutcome test;
    std::map<std::string, DnsOutcome> controls;
};

enum class DirectClass {
    uncensored,      // test answers are a subset of the control-union set
    censored_error,  // test errored while at least one control answered
    censored_bogon,  // test answered with a special-use address
    mismatch,        // real answers disjoint enough to need the MRF stage
    untestable,      // test timed out, or no control produced an answer
};
std::string_view to_string(DirectClass c);

struct DnsAnalysisConfig {
    double sigma_mult = 3.0;
    double sigma_floor = 0.01;
    size_t min_dprime = 20;
    size_t min_control_channels = 2;
};

/// Union of every address any control channel returned for the domain.
std::set<Ipv4> control_ip_union(const DomainDnsData& data);

DirectClass classify_direct(const DomainDnsData& data, const BogonList& bogons);

/// Modal-IP relative frequency over one channel's answers (first listed
/// address per answer). Ties break toward the lexicographically smallest
/// dotted-quad. Throws std::invalid_argument("empty sample") when no outcome
/// carries an answer.
MrfStat compute_mrf(const std::string& channel_id, const std::vector<DnsOutcome>& outcomes);

/// True when the test channel's modal frequency sits more than
/// sigma_mult * max(stddev, sigma_floor) above the control mean. Throws
/// std::invalid_argument("insufficient controls") with fewer than
/// `min_control_channels` control stats.
struct TamperingDecision {
    bool tampering = false;
    double control_mean = 0.0;
    double control_stddev = 0.0;
    double threshold = 0.0;  // mean + mult * max(stddev, floor)
};
TamperingDecision detect_tampering(const MrfStat& test, const std::vector<MrfStat>& controls,
                                   const DnsAnalysisConfig& cfg = {});

struct MrfReport {
    size_t dprime_size = 0;
    bool evaluated = false;   // MRF comparison actually ran
    bool tampering = false;
    std::string gate_reason;  // set when !evaluated: dprime_below_minimum, insufficient_controls
    std::optional<MrfStat> test_stat;
    std::vector<MrfStat> control_stats;
    double control_mean = 0.0;
    double control_stddev = 0.0;
    double threshold = 0.0;
};

struct DnsAnalysisResult {
    std::vector<ProbeVerdict> verdicts;  // one per input domain, input order
    MrfReport mrf;
};

/// Full per-run pipeline: direct classification, D' assembly, MRF tampering
/// detection, and per-domain marking by the modal address.
DnsAnalysisResult analyze_dns(const std::vector<DomainDnsData>& data, const BogonList& bogons,
                              const DnsAnalysisConfig& cfg = {});

}  // namespace cenprobe
