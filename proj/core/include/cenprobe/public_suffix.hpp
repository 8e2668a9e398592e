#pragma once

#include <set>
#include <string>
#include <string_view>

namespace cenprobe {

/// Public-suffix matching for the redirect-hostname comparison: a hostname's
/// registrable domain is one label beneath its longest matching suffix.
///
/// Ships a built-in subset of the public suffix list (common gTLDs and the
/// multi-level ccTLD suffixes seen in blocklist data) and accepts extra rules
/// in PSL syntax: plain suffixes, "*." wildcards, "!" exceptions.
class PublicSuffixList {
public:
    static PublicSuffixList builtin();
    static PublicSuffixList from_file(const std::string& path);

    void add_rule(std::string_view rule);

    // eTLD+1 of `host` (lowercased). A host that is itself a public suffix, or
    // a single label, maps to itself.
    std::string registrable_domain(std::string_view host) const;

private:
    std::set<std::string> exact_;
    std::set<std::string> wildcard_;   // stored without the "*." prefix
    std::set<std::string> exception_;  // stored without the "!" prefix
};

}  // namespace cenprobe
