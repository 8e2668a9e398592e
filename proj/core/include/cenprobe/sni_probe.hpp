#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "cenprobe/net.hpp"
#include "cenprobe/tls_util.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe {

struct SniProbeConfig {
    int attempts = 3;
    std::chrono::milliseconds timeout{10'000};
    std::chrono::milliseconds retry_delay{0};
    std::uint16_t port = 443;
};

struct SniAttempt {
    net::ConnectStatus connect = net::ConnectStatus::error;
    tls::HsStatus handshake = tls::HsStatus::error;
    bool ok() const {
        return connect == net::ConnectStatus::ok && handshake == tls::HsStatus::ok;
    }
};

struct SniProbeRecord {
    Domain domain;
    Ipv4 reflector_ip;
    std::vector<SniAttempt> test_attempts;
    std::vector<SniAttempt> control_attempts;
    Verdict verdict = Verdict::untestable;
    std::string evidence;
    std::string note;
};

/// Offers `domain` as the SNI of a TLS 1.3 ClientHello toward a reflector
/// that accepts any name. Only handshake completion matters; certificates are
/// not validated. Censored when every test-side handshake fails while the
/// control side completes one.
SniProbeRecord probe_sni(const net::Vantage& test, const net::Vantage& control,
                         const Domain& domain, const Ipv4& reflector_ip,
                         const SniProbeConfig& cfg = {});

/// Verdict assembly alone, for replaying recorded attempts.
void finish_sni_record(SniProbeRecord& rec);

}  // namespace cenprobe
