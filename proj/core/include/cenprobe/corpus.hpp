#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cenprobe/dns.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe::corpus {

enum class SourceKind { government_order, court_order, user_report, other };

std::string_view to_string(SourceKind k);
std::optional<SourceKind> source_kind_from_string(std::string_view s);

struct SourceEntry {
    std::string raw_url;
    SourceKind source_kind = SourceKind::other;
    std::string source_id;
};

enum class ListFormat { plain, csv };

struct RowError {
    size_t line;  // 1-based
    std::string message;
};

struct ParseResult {
    std::vector<SourceEntry> entries;
    std::vector<RowError> errors;  // malformed rows; parsing continues past them
};

// Plain: one URL per line, '#' comments. CSV: url,source_kind,source_id.
ParseResult parse_source_list(std::istream& raw, ListFormat format);

enum class SkipReason { unparseable, bare_ip, invalid_idna };

struct SkippedEntry {
    size_t index;  // position in the input entry list
    std::string raw_url;
    SkipReason reason;
};

struct ExtractResult {
    std::set<Domain> domains;
    // Which source ids contributed each domain, for the JSON sidecar.
    std::map<Domain, std::set<std::string>> sources;
    std::vector<SkippedEntry> skipped;
};

// Hostname extraction + normalization: lowercase, strip scheme/userinfo/
// port/path, punycode non-ASCII labels, drop duplicates. Bare-IP URLs are
// recorded as skipped (untestable) rather than guessed at.
ExtractResult extract_domains(const std::vector<SourceEntry>& entries);

// Exposed for extract_domains tests and the idempotence property.
std::optional<Domain> normalize_url_to_domain(std::string_view raw_url, SkipReason* reason);

struct LivenessResult {
    std::set<Domain> live;
    std::set<Domain> untestable;  // not covered by control_results
};

// A domain is live iff >=1 control channel answered with a non-empty IP set.
LivenessResult filter_live(const std::set<Domain>& domains,
                           const std::map<Domain, std::vector<dns::DnsOutcome>>& control_results);

}  // namespace cenprobe::corpus
