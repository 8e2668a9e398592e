#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cenprobe/dns.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe {

/// Per-technique censored/untestable domain sets pulled out of a verdict
/// stream.
struct TechniqueSets {
    std::map<std::string, std::set<std::string>> censored;
    std::map<std::string, std::set<std::string>> untestable;
    std::set<std::string> domains;  // everything that appeared
};
TechniqueSets aggregate_verdicts(const std::vector<ProbeVerdict>& verdicts);

struct JaccardResult {
    double value = 0.0;
    // Two empty sets have no overlap to speak of; the 1.0 is a convention,
    // so it ships with a flag instead of silently looking like agreement.
    bool degenerate = false;
};
JaccardResult jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

struct OverlapMatrix {
    std::vector<std::string> names;  // sorted
    // jaccard[i][j] symmetric with 1.0 on the diagonal; intersection[i][j]
    // holds |names[i] ∩ names[j]|.
    std::vector<std::vector<double>> jaccard;
    std::vector<std::vector<std::size_t>> intersection;
};
/// Pairwise overlap of named sets. Throws std::invalid_argument given fewer
/// than two sets.
OverlapMatrix overlap_matrix(const std::map<std::string, std::set<std::string>>& sets);

/// Exclusive-region counts. Regions are named "<t>_only" for one technique,
/// "both" for the overlap of exactly two techniques overall, "all" for the
/// full overlap of three or more, and "a+b" (sorted, '+'-joined) for other
/// combinations. Region counts sum to |union of all sets|.
std::map<std::string, std::size_t> technique_venn(
    const std::map<std::string, std::set<std::string>>& sets);

struct IpFrequencyRow {
    Ipv4 ip;
    std::size_t count = 0;
    double fraction = 0.0;
};
/// First-listed answer address frequencies, sorted by count descending then
/// dotted-quad ascending. Same sample convention as the MRF statistic.
std::vector<IpFrequencyRow> ip_frequency_table(const std::vector<DnsOutcome>& outcomes);
std::vector<IpFrequencyRow> ip_frequency_table(const std::vector<DnsObservation>& observations);

struct CollateralExclusion {
    std::string domain;
    std::string signature;  // the foreign network's identifier
};

struct Blocklist {
    std::string isp;
    std::set<std::string> domains;  // union over per_technique values
    std::map<std::string, std::set<std::string>> per_technique;
    std::vector<CollateralExclusion> excluded;  // audit trail
};

/// Builds one network's blocklist from its verdicts. A domain is listed iff
/// at least one technique found it censored and the block is attributable to
/// this network: either no blockpage signature matched, or the matched
/// signature is this network's own. A foreign signature means the block
/// happened elsewhere on the path (collateral), so the domain is excluded
/// and recorded with the signature that disqualified it.
///
/// `signatures_matched` (domain → signature id) supplements signatures
/// carried on the verdicts themselves.
Blocklist assemble_blocklist(const std::string& isp,
                             const std::vector<ProbeVerdict>& verdicts,
                             const std::map<std::string, std::string>& signatures_matched = {});

}  // namespace cenprobe
