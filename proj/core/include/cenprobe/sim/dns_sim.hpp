#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <thread>

#include "cenprobe/net.hpp"
#include "cenprobe/sim/scenario.hpp"
#include "cenprobe/sim/transcript.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe::sim {

/// UDP resolver for the emulated zone. Control instances serve the zone
/// as-is; the instance with `apply_rules` set plays the censoring resolver
/// and applies the scenario's dns_rules first.
class DnsSimServer {
public:
    struct Config {
        std::string id;
        bool apply_rules = false;
        std::uint32_t ttl = 60;
        const Scenario* scenario = nullptr;
        std::map<std::string, Ipv4> zone;
        Transcript* transcript = nullptr;
    };

    explicit DnsSimServer(Config cfg) : cfg_(std::move(cfg)) {}
    ~DnsSimServer() { stop(); }

    bool start();
    void stop();
    std::uint16_t port() const { return port_; }
    std::string address() const { return "127.0.0.1:" + std::to_string(port_); }

private:
    void loop();

    Config cfg_;
    net::Socket sock_;
    std::uint16_t port_ = 0;
    std::thread thread_;
    std::atomic<bool> stopping_{false};
};

}  // namespace cenprobe::sim
