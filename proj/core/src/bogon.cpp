#include "cenprobe/bogon.hpp"

#include <fstream>
#include <stdexcept>

#include "cenprobe/strings.hpp"

namespace cenprobe {

bool CidrRange::contains(const Ipv4& ip) const {
    if (prefix_len == 0) return true;
    std::uint32_t mask = prefix_len >= 32 ? 0xFFFFFFFFu : ~((1u << (32 - prefix_len)) - 1);
    return (ip.value() & mask) == (network & mask);
}

std::optional<CidrRange> parse_cidr(std::string_view text) {
    size_t slash = text.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto ip = Ipv4::parse(text.substr(0, slash));
    if (!ip) return std::nullopt;
    int len = 0;
    auto rest = text.substr(slash + 1);
    if (rest.empty() || rest.size() > 2) return std::nullopt;
    for (char c : rest) {
        if (c < '0' || c > '9') return std::nullopt;
        len = len * 10 + (c - '0');
    }
    if (len > 32) return std::nullopt;
    return CidrRange{ip->value(), len};
}

BogonList BogonList::builtin() {
    static constexpr const char* kRanges[] = {
        "0.0.0.0/8",        // "this network", RFC 1122
        "10.0.0.0/8",       // private, RFC 1918
        "100.64.0.0/10",    // shared address space, RFC 6598
        "127.0.0.0/8",      // loopback, RFC 1122
        "169.254.0.0/16",   // link local, RFC 3927
        "172.16.0.0/12",    // private, RFC 1918
        "192.0.0.0/24",     // IETF protocol assignments, RFC 6890
        "192.0.2.0/24",     // TEST-NET-1, RFC 5737
        "192.88.99.0/24",   // deprecated 6to4 relay, RFC 7526
        "192.168.0.0/16",   // private, RFC 1918
        "198.18.0.0/15",    // benchmarking, RFC 2544
        "198.51.100.0/24",  // TEST-NET-2, RFC 5737
        "203.0.113.0/24",   // TEST-NET-3, RFC 5737
        "224.0.0.0/4",      // multicast, RFC 5771
        "240.0.0.0/4",      // reserved, RFC 1112
    };
    BogonList list;
    for (const char* r : kRanges) list.add(*parse_cidr(r));
    return list;
}

BogonList BogonList::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("bogon list unreadable: " + path);
    BogonList list = builtin();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = strings::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto range = parse_cidr(t);
        if (!range)
            throw std::runtime_error("bogon list " + path + ":" + std::to_string(lineno) +
                                     ": bad prefix '" + t + "'");
        list.add(*range);
    }
    return list;
}

bool BogonList::contains(const Ipv4& ip) const {
    for (const auto& r : ranges_)
        if (r.contains(ip)) return true;
    return false;
}

}  // namespace cenprobe
