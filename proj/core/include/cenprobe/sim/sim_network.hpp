#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cenprobe/dns_channel.hpp"
#include "cenprobe/net.hpp"
#include "cenprobe/sim/dns_sim.hpp"
#include "cenprobe/sim/http_origin.hpp"
#include "cenprobe/sim/reflector.hpp"
#include "cenprobe/sim/relay.hpp"
#include "cenprobe/sim/scenario.hpp"
#include "cenprobe/sim/transcript.hpp"

namespace cenprobe::sim {

struct SimNetworkConfig {
    size_t control_resolvers = 5;
    size_t control_vantages = 3;
    size_t max_jitter = 3;
    std::chrono::milliseconds relay_silence{3'000};
};

/// Brings up the whole emulated measurement environment on loopback:
/// one censoring resolver plus N clean ones, per-vantage copies of the
/// origin web, a TLS reflector, and one relay per vantage (the test relay
/// enforces the scenario's censor policy). Virtual addresses keep probe
/// traffic off the real network while still looking routable.
class SimNetwork {
public:
    explicit SimNetwork(Scenario scenario, SimNetworkConfig cfg = {});
    ~SimNetwork();

    SimNetwork(const SimNetwork&) = delete;
    SimNetwork& operator=(const SimNetwork&) = delete;

    bool start();
    void stop();

    const Scenario& scenario() const { return scenario_; }
    Transcript& transcript() { return transcript_; }

    ChannelSpec test_channel() const;
    std::vector<ChannelSpec> control_channels() const;
    net::VantageSpec test_vantage() const;
    std::vector<net::VantageSpec> control_vantages() const;

    Ipv4 reflector_ip() const { return reflector_ip_; }
    const std::map<std::string, Ipv4>& origin_ips() const { return origin_ips_; }

private:
    RouteTable make_routes(std::uint16_t origin_port) const;

    Scenario scenario_;
    SimNetworkConfig cfg_;
    Transcript transcript_;
    std::map<std::string, Ipv4> origin_ips_;
    Ipv4 reflector_ip_;

    std::unique_ptr<DnsSimServer> test_dns_;
    std::vector<std::unique_ptr<DnsSimServer>> control_dns_;
    std::unique_ptr<Reflector> reflector_;
    std::unique_ptr<OriginServer> test_origin_;
    std::vector<std::unique_ptr<OriginServer>> control_origins_;
    std::unique_ptr<RelayServer> test_relay_;
    std::vector<std::unique_ptr<RelayServer>> control_relays_;
    bool started_ = false;
};

}  // namespace cenprobe::sim
