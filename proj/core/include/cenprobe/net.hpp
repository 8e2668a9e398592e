#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cenprobe/types.hpp"

namespace cenprobe::net {

using Clock = std::chrono::steady_clock;
using Deadline = Clock::time_point;

inline Deadline deadline_in(std::chrono::milliseconds ms) { return Clock::now() + ms; }

/// Move-only owner of a socket fd.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket() { close(); }

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    int release();
    void close();

    // Closes with SO_LINGER{on,0} so the peer sees a TCP RST.
    void close_with_rst();

private:
    int fd_ = -1;
};

enum class IoStatus { ok, eof, timeout, reset, error };

struct IoResult {
    IoStatus status = IoStatus::error;
    size_t n = 0;
};

// 1 ready, 0 timed out, -1 error.
int wait_readable(int fd, Deadline deadline);
int wait_writable(int fd, Deadline deadline);

IoResult read_some(int fd, char* buf, size_t len, Deadline deadline);
IoStatus write_all(int fd, std::string_view data, Deadline deadline);

// Reads until '\n' (inclusive limit `max_len`); the newline is stripped,
// a trailing '\r' too.
struct LineResult {
    IoStatus status = IoStatus::error;
    std::string line;
};
LineResult read_line(int fd, Deadline deadline, size_t max_len = 512);

enum class ConnectStatus { ok, refused, timeout, unreachable, error };
std::string_view to_string(ConnectStatus s);

struct ConnectResult {
    ConnectStatus status = ConnectStatus::error;
    Socket sock;
};

// Non-blocking connect with deadline. `host` may be dotted-quad or a name.
ConnectResult tcp_connect(const std::string& host, std::uint16_t port, Deadline deadline);

struct Listener {
    Socket sock;
    std::uint16_t port = 0;
};

// Listens on 127.0.0.1; port 0 picks an ephemeral port.
std::optional<Listener> listen_loopback(std::uint16_t port = 0);

// Accept with deadline; invalid socket on timeout/error.
Socket accept_conn(int listen_fd, Deadline deadline);

/// How a probe reaches the network under test: directly from this host, or
/// through a relay speaking the one-line CONNECT/PING protocol (the Tor
/// substitute; also how the simulator interposes).
struct VantageSpec {
    enum class Kind { local, relay };
    std::string id;
    Kind kind = Kind::local;
    std::string address;  // "host:port" of the relay when kind == relay
    bool icmp_enabled = true;
};

enum class PingStatus { ok, timeout, unreachable, capability_missing };
std::string_view to_string(PingStatus s);

class Vantage {
public:
    explicit Vantage(VantageSpec spec) : spec_(std::move(spec)) {}

    const VantageSpec& spec() const { return spec_; }
    const std::string& id() const { return spec_.id; }

    ConnectResult connect(const Ipv4& ip, std::uint16_t port,
                          std::chrono::milliseconds timeout) const;
    PingStatus ping(const Ipv4& ip, std::chrono::milliseconds timeout) const;

private:
    VantageSpec spec_;
};

// Relay wire protocol helpers, shared with the simulator's relay endpoint.
namespace relay {
inline constexpr std::string_view kOk = "OK";
inline constexpr std::string_view kErrRefused = "ERR refused";
inline constexpr std::string_view kErrUnreachable = "ERR unreachable";
}  // namespace relay

}  // namespace cenprobe::net
