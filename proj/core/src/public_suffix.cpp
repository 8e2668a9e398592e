#include "cenprobe/public_suffix.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

#include "cenprobe/strings.hpp"

namespace cenprobe {

namespace {
// Not the full PSL: the common gTLDs plus the multi-level ccTLD suffixes that
// actually occur in Indian blocklist sources and our fixtures.
constexpr const char* kBuiltinRules[] = {
    "com", "org", "net", "edu", "gov", "mil", "int", "info", "biz", "name", "mobi", "app",
    "dev", "io", "co", "me", "tv", "cc", "ws", "xyz", "site", "online", "club", "shop",
    "in", "co.in", "net.in", "org.in", "firm.in", "gen.in", "ind.in", "ac.in", "edu.in",
    "res.in", "gov.in", "mil.in", "nic.in",
    "uk", "co.uk", "org.uk", "net.uk", "ac.uk", "gov.uk", "me.uk", "ltd.uk", "plc.uk",
    "au", "com.au", "net.au", "org.au", "edu.au", "gov.au", "id.au",
    "jp", "co.jp", "or.jp", "ne.jp", "ac.jp", "go.jp",
    "nz", "co.nz", "org.nz", "net.nz",
    "za", "co.za", "org.za", "net.za",
    "br", "com.br", "org.br", "net.br",
    "cn", "com.cn", "org.cn", "net.cn", "gov.cn",
    "ru", "com.ru", "org.ru", "net.ru",
    "pk", "com.pk", "org.pk", "net.pk", "gov.pk",
    "bd", "com.bd", "gov.bd",
    "lk", "com.lk", "org.lk",
    "np", "com.np", "org.np",
    "sg", "com.sg", "org.sg",
    "us", "eu", "de", "fr", "it", "es", "nl", "se", "no", "ch", "at", "be", "pl", "ir",
    "to", "ly", "am", "fm", "is", "ai", "gg", "su", "pro", "vip", "top", "fun", "live",
    "example", "test", "invalid", "localhost",
};
}  // namespace

PublicSuffixList PublicSuffixList::builtin() {
    PublicSuffixList psl;
    for (const char* rule : kBuiltinRules) psl.add_rule(rule);
    return psl;
}

PublicSuffixList PublicSuffixList::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("public suffix list unreadable: " + path);
    PublicSuffixList psl = builtin();
    std::string line;
    while (std::getline(in, line)) {
        std::string t = strings::trim(line);
        if (t.empty() || strings::starts_with(t, "//") || t[0] == '#') continue;
        psl.add_rule(t);
    }
    return psl;
}

void PublicSuffixList::add_rule(std::string_view rule) {
    std::string r = strings::to_lower(strings::trim(rule));
    if (r.empty()) return;
    if (r[0] == '!') {
        exception_.insert(r.substr(1));
    } else if (strings::starts_with(r, "*.")) {
        wildcard_.insert(r.substr(2));
    } else {
        exact_.insert(r);
    }
}

std::string PublicSuffixList::registrable_domain(std::string_view host) const {
    std::string h = strings::to_lower(host);
    while (!h.empty() && h.back() == '.') h.pop_back();
    auto labels = strings::split(h, '.');
    if (labels.size() <= 1) return h;

    // Longest matching rule wins; exceptions cancel a wildcard match.
    size_t suffix_labels = 1;  // unknown TLDs behave as single-label suffixes
    for (size_t start = 0; start < labels.size(); ++start) {
        std::vector<std::string> tail(labels.begin() + static_cast<long>(start), labels.end());
        std::string candidate = strings::join(tail, ".");
        size_t n = labels.size() - start;
        if (exception_.count(candidate)) {
            suffix_labels = n - 1;
            break;
        }
        if (exact_.count(candidate)) {
            suffix_labels = std::max(suffix_labels, n);
        }
        if (start + 1 < labels.size()) {
            std::vector<std::string> wtail(labels.begin() + static_cast<long>(start) + 1,
                                           labels.end());
            if (wildcard_.count(strings::join(wtail, "."))) {
                suffix_labels = std::max(suffix_labels, n);
            }
        }
    }
    if (suffix_labels >= labels.size()) return h;  // host is itself a suffix
    size_t keep = suffix_labels + 1;
    std::vector<std::string> out(labels.end() - static_cast<long>(keep), labels.end());
    return strings::join(out, ".");
}

}  // namespace cenprobe
