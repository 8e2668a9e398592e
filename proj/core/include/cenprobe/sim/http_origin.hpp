#pragma once

#include <cstdint>
#include <string>

#include "cenprobe/sim/scenario.hpp"
#include "cenprobe/sim/tcp_server.hpp"
#include "cenprobe/sim/transcript.hpp"

namespace cenprobe::sim {

// Stable string hash (FNV-1a folded through splitmix64); the same inputs
// produce the same jitter on every platform and run.
std::uint64_t stable_hash(std::string_view s);
std::uint64_t stable_hash(std::uint64_t seed, std::string_view a, std::string_view b);

/// Deterministic page for origins that don't pin a body: structure and length
/// vary per domain, never per vantage.
std::string generate_origin_body(const std::string& domain, std::uint64_t seed);

/// The emulated web, one instance per vantage. Sites are selected by Host
/// header. Instances differ only in benign per-vantage length jitter
/// (trailing spaces, at most `max_jitter` bytes), emulating the small
/// response-size variation real sites show between clients.
class OriginServer : public ThreadedTcpServer {
public:
    struct Config {
        std::string id;           // vantage id, also the jitter salt
        const Scenario* scenario = nullptr;
        Transcript* transcript = nullptr;
        std::size_t max_jitter = 3;
    };

    explicit OriginServer(Config cfg) : cfg_(std::move(cfg)) {}
    ~OriginServer() override { stop(); }

    // Full response bytes for a Host value, exposed for tests.
    std::string render_response(const std::string& host) const;

protected:
    void handle(net::Socket conn) override;

private:
    Config cfg_;
};

}  // namespace cenprobe::sim
