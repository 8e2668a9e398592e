#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <vector>

#include "cenprobe/net.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe {

struct TcpProbeConfig {
    int retries = 5;  // re-attempts after the initial failure
    std::chrono::milliseconds retry_delay{100'000};
    std::chrono::milliseconds connect_timeout{10'000};
    bool ping_first = true;
    std::chrono::milliseconds ping_timeout{2'000};
};

using SleepFn = std::function<void(std::chrono::milliseconds)>;

struct TcpProbeRecord {
    Domain domain;
    Ipv4 ip;
    std::uint16_t port = 0;
    bool ping_ran = false;
    net::PingStatus ping = net::PingStatus::capability_missing;
    std::vector<net::ConnectStatus> test_attempts;
    std::vector<net::ConnectStatus> control_attempts;
    Verdict verdict = Verdict::untestable;
    std::string evidence;
    std::string note;
};

/// Connects to ip:port from the test vantage, retrying `cfg.retries` times
/// after an initial failure with `cfg.retry_delay` between attempts, then
/// verifies reachability from the control vantage with the same discipline.
/// Censored only when every test attempt fails and the control succeeds.
/// An optional ICMP echo runs first purely as recorded context; a missing
/// ping capability downgrades to a note, never to a verdict.
TcpProbeRecord probe_tcp(const net::Vantage& test, const net::Vantage& control,
                         const Domain& domain, const Ipv4& ip, std::uint16_t port,
                         const TcpProbeConfig& cfg = {}, const SleepFn& sleep = {});

/// Verdict assembly alone, for replaying recorded attempts.
void finish_tcp_record(TcpProbeRecord& rec);

}  // namespace cenprobe
