#include "cenprobe/dns.hpp"

#include <algorithm>

namespace cenprobe::dns {

std::string_view to_string(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::answers: return "answers";
        case OutcomeKind::error: return "error";
        case OutcomeKind::timeout: return "timeout";
    }
    return "timeout";
}

std::string_view to_string(RCode c) {
    switch (c) {
        case RCode::nxdomain: return "NXDOMAIN";
        case RCode::servfail: return "SERVFAIL";
        case RCode::refused: return "REFUSED";
        case RCode::other: return "other";
    }
    return "other";
}

DnsOutcome DnsOutcome::answers(std::vector<Ipv4> ips, std::optional<std::uint32_t> ttl) {
    DnsOutcome o;
    o.kind = OutcomeKind::answers;
    o.ips = std::move(ips);
    o.min_ttl = ttl;
    return o;
}

DnsOutcome DnsOutcome::error(RCode code) {
    DnsOutcome o;
    o.kind = OutcomeKind::error;
    o.error_code = code;
    return o;
}

DnsOutcome DnsOutcome::timeout() {
    return DnsOutcome{};
}

bool DnsOutcome::contains(const Ipv4& ip) const {
    return std::find(ips.begin(), ips.end(), ip) != ips.end();
}

}  // namespace cenprobe::dns
