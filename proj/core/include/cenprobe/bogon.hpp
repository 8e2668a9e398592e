#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cenprobe/types.hpp"

namespace cenprobe {

struct CidrRange {
    std::uint32_t network = 0;  // host order
    int prefix_len = 0;

    bool contains(const Ipv4& ip) const;
};

std::optional<CidrRange> parse_cidr(std::string_view text);

/// Reserved and special-use prefixes that must never appear as a legitimate
/// public DNS answer. Ships the IANA special-use IPv4 registry ranges and can
/// be extended from a file (one CIDR per line, '#' comments).
class BogonList {
public:
    // RFC 1122/1918/3927/5737/6598/... special-use ranges.
    static BogonList builtin();

    // builtin() plus prefixes read from `path`. Throws std::runtime_error on
    // unreadable file or malformed prefix.
    static BogonList from_file(const std::string& path);

    void add(CidrRange range) { ranges_.push_back(range); }
    bool contains(const Ipv4& ip) const;
    size_t size() const { return ranges_.size(); }

private:
    std::vector<CidrRange> ranges_;
};

inline bool is_bogon(const Ipv4& ip, const BogonList& bogons) { return bogons.contains(ip); }

}  // namespace cenprobe
