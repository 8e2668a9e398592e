#include "cenprobe/corpus.hpp"

#include <algorithm>

#include "cenprobe/punycode.hpp"
#include "cenprobe/strings.hpp"

namespace cenprobe::corpus {

std::string_view to_string(SourceKind k) {
    switch (k) {
        case SourceKind::government_order: return "government_order";
        case SourceKind::court_order: return "court_order";
        case SourceKind::user_report: return "user_report";
        case SourceKind::other: return "other";
    }
    return "other";
}

std::optional<SourceKind> source_kind_from_string(std::string_view s) {
    if (s == "government_order") return SourceKind::government_order;
    if (s == "court_order") return SourceKind::court_order;
    if (s == "user_report") return SourceKind::user_report;
    if (s == "other") return SourceKind::other;
    return std::nullopt;
}

ParseResult parse_source_list(std::istream& raw, ListFormat format) {
    ParseResult result;
    std::string line;
    size_t lineno = 0;
    while (std::getline(raw, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = strings::trim(line);
        if (t.empty() || t[0] == '#') continue;

        if (format == ListFormat::plain) {
            result.entries.push_back({t, SourceKind::other, ""});
            continue;
        }

        auto fields = strings::parse_csv_row(t);
        if (!fields) {
            result.errors.push_back({lineno, "malformed CSV quoting"});
            continue;
        }
        if (fields->size() < 2 || fields->size() > 3) {
            result.errors.push_back({lineno, "expected url,source_kind[,source_id]"});
            continue;
        }
        std::string url = strings::trim((*fields)[0]);
        if (url.empty()) {
            result.errors.push_back({lineno, "empty url field"});
            continue;
        }
        auto kind = source_kind_from_string(strings::trim((*fields)[1]));
        if (!kind) {
            result.errors.push_back({lineno, "unknown source_kind '" + (*fields)[1] + "'"});
            continue;
        }
        std::string id = fields->size() == 3 ? strings::trim((*fields)[2]) : "";
        result.entries.push_back({url, *kind, id});
    }
    return result;
}

namespace {

bool looks_like_ipv4(std::string_view host) {
    return Ipv4::parse(host).has_value();
}

bool looks_like_ipv6(std::string_view host) {
    return !host.empty() && host.front() == '[';
}

// Pulls the hostname out of a noisy URL: optional scheme, optional userinfo,
// stop at port/path/query/fragment.
std::optional<std::string> url_host(std::string_view raw) {
    std::string s = strings::trim(raw);
    if (s.empty()) return std::nullopt;
    if (s.find(' ') != std::string::npos || s.find('\t') != std::string::npos)
        return std::nullopt;

    size_t scheme = s.find("://");
    size_t start = 0;
    if (scheme != std::string::npos) {
        start = scheme + 3;
    } else if (strings::starts_with(s, "//")) {
        start = 2;
    }
    std::string rest = s.substr(start);
    if (rest.empty()) return std::nullopt;

    size_t end = rest.find_first_of("/?#");
    std::string authority = end == std::string::npos ? rest : rest.substr(0, end);
    size_t at = authority.rfind('@');
    if (at != std::string::npos) authority = authority.substr(at + 1);
    if (authority.empty()) return std::nullopt;

    if (looks_like_ipv6(authority)) return authority;  // caller records bare_ip
    size_t colon = authority.rfind(':');
    if (colon != std::string::npos) {
        std::string_view port(authority.data() + colon + 1, authority.size() - colon - 1);
        if (port.empty() || !std::all_of(port.begin(), port.end(), [](char c) {
                return c >= '0' && c <= '9';
            }))
            return std::nullopt;
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) return std::nullopt;
    return authority;
}

}  // namespace

std::optional<Domain> normalize_url_to_domain(std::string_view raw_url, SkipReason* reason) {
    auto set_reason = [&](SkipReason r) {
        if (reason) *reason = r;
    };
    auto host_opt = url_host(raw_url);
    if (!host_opt) {
        set_reason(SkipReason::unparseable);
        return std::nullopt;
    }
    std::string host = *host_opt;
    if (looks_like_ipv6(host) || looks_like_ipv4(host)) {
        set_reason(SkipReason::bare_ip);
        return std::nullopt;
    }
    while (!host.empty() && host.back() == '.') host.pop_back();
    if (host.empty()) {
        set_reason(SkipReason::unparseable);
        return std::nullopt;
    }

    std::vector<std::string> out_labels;
    for (const auto& label : strings::split(host, '.')) {
        auto encoded = punycode::encode_label(strings::to_lower(label));
        if (!encoded) {
            set_reason(SkipReason::invalid_idna);
            return std::nullopt;
        }
        out_labels.push_back(*encoded);
    }
    auto domain = Domain::parse(strings::join(out_labels, "."));
    if (!domain) {
        set_reason(SkipReason::invalid_idna);
        return std::nullopt;
    }
    return domain;
}

ExtractResult extract_domains(const std::vector<SourceEntry>& entries) {
    ExtractResult result;
    for (size_t i = 0; i < entries.size(); ++i) {
        SkipReason reason = SkipReason::unparseable;
        auto domain = normalize_url_to_domain(entries[i].raw_url, &reason);
        if (!domain) {
            result.skipped.push_back({i, entries[i].raw_url, reason});
            continue;
        }
        result.domains.insert(*domain);
        if (!entries[i].source_id.empty())
            result.sources[*domain].insert(entries[i].source_id);
        else
            result.sources[*domain].insert(std::string(to_string(entries[i].source_kind)));
    }
    return result;
}

LivenessResult filter_live(
    const std::set<Domain>& domains,
    const std::map<Domain, std::vector<dns::DnsOutcome>>& control_results) {
    LivenessResult result;
    for (const auto& d : domains) {
        auto it = control_results.find(d);
        if (it == control_results.end()) {
            result.untestable.insert(d);
            continue;
        }
        bool resolves = std::any_of(it->second.begin(), it->second.end(),
                                    [](const dns::DnsOutcome& o) { return o.has_answers(); });
        if (resolves) result.live.insert(d);
    }
    return result;
}

}  // namespace cenprobe::corpus
