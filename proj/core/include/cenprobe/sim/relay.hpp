#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "cenprobe/sim/scenario.hpp"
#include "cenprobe/sim/tcp_server.hpp"
#include "cenprobe/sim/transcript.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe::sim {

/// Where virtual (ip, port) endpoints actually live on loopback.
using RouteTable = std::map<std::pair<Ipv4, std::uint16_t>, std::uint16_t>;

/// The vantage-side network edge, speaking the one-line CONNECT/PING
/// protocol. A censoring relay enforces the scenario's tcp_rules at connect
/// time, its http_rules on port-80 flows (Host-based middlebox), and its
/// sni_blocklist on port-443 flows (ClientHello inspection, reset
/// injection). Non-censoring relays pass everything through.
class RelayServer : public ThreadedTcpServer {
public:
    struct Config {
        std::string id;  // vantage id
        bool censoring = false;
        const Scenario* scenario = nullptr;
        RouteTable routes;
        std::map<Ipv4, std::string> ip_domains;  // reverse map for tcp_rules
        Transcript* transcript = nullptr;
        // How long a "drop" keeps the client waiting before the relay gives
        // up; must exceed the probe's connect timeout for drops to read as
        // timeouts.
        std::chrono::milliseconds silence{3'000};
    };

    explicit RelayServer(Config cfg) : cfg_(std::move(cfg)) {}
    ~RelayServer() override { stop(); }

protected:
    void handle(net::Socket conn) override;

private:
    void record(const std::string& kind, const std::string& detail);
    void handle_connect(net::Socket& conn, const Ipv4& ip, std::uint16_t port);
    void run_http_middlebox(net::Socket& conn, std::uint16_t upstream_port);
    void run_sni_filter(net::Socket& conn, std::uint16_t upstream_port);
    void forward(net::Socket& client, std::uint16_t upstream_port,
                 const std::string& buffered);

    Config cfg_;
};

}  // namespace cenprobe::sim
