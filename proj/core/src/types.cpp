#include "cenprobe/types.hpp"

#include <cctype>
#include <cstdio>

namespace cenprobe {

std::optional<Ipv4> Ipv4::parse(std::string_view dotted) {
    std::uint32_t addr = 0;
    int octets = 0;
    std::uint32_t cur = 0;
    bool have_digit = false;
    for (size_t i = 0; i <= dotted.size(); ++i) {
        if (i == dotted.size() || dotted[i] == '.') {
            if (!have_digit || octets == 4) return std::nullopt;
            addr = (addr << 8) | cur;
            ++octets;
            cur = 0;
            have_digit = false;
        } else if (std::isdigit(static_cast<unsigned char>(dotted[i]))) {
            cur = cur * 10 + static_cast<std::uint32_t>(dotted[i] - '0');
            if (cur > 255) return std::nullopt;
            have_digit = true;
        } else {
            return std::nullopt;
        }
    }
    if (octets != 4) return std::nullopt;
    return Ipv4(addr);
}

std::string Ipv4::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (addr_ >> 24) & 0xFF, (addr_ >> 16) & 0xFF,
                  (addr_ >> 8) & 0xFF, addr_ & 0xFF);
    return buf;
}

bool lexicographic_less(const Ipv4& a, const Ipv4& b) {
    return a.to_string() < b.to_string();
}

namespace {
bool valid_label(std::string_view label) {
    if (label.empty() || label.size() > 63) return false;
    if (label.front() == '-' || label.back() == '-') return false;
    for (char c : label) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
        if (!ok) return false;
    }
    return true;
}
}  // namespace

std::optional<Domain> Domain::parse(std::string_view name) {
    if (name.empty() || name.size() > 253) return std::nullopt;
    size_t start = 0;
    size_t labels = 0;
    for (size_t i = 0; i <= name.size(); ++i) {
        if (i == name.size() || name[i] == '.') {
            if (!valid_label(name.substr(start, i - start))) return std::nullopt;
            ++labels;
            start = i + 1;
        }
    }
    if (labels == 0) return std::nullopt;
    return Domain(std::string(name));
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::censored: return "censored";
        case Verdict::uncensored: return "uncensored";
        case Verdict::untestable: return "untestable";
    }
    return "untestable";
}

std::optional<Verdict> verdict_from_string(std::string_view s) {
    if (s == "censored") return Verdict::censored;
    if (s == "uncensored") return Verdict::uncensored;
    if (s == "untestable") return Verdict::untestable;
    return std::nullopt;
}

}  // namespace cenprobe
