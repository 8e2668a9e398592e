#include "cenprobe/net.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/ip_icmp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "cenprobe/strings.hpp"

namespace cenprobe::net {

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

int Socket::release() {
    int fd = fd_;
    fd_ = -1;
    return fd;
}

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Socket::close_with_rst() {
    if (fd_ < 0) return;
    struct linger lg{};
    lg.l_onoff = 1;
    lg.l_linger = 0;
    ::setsockopt(fd_, SOL_SOCKET, SO_LINGER, &lg, sizeof(lg));
    close();
}

namespace {

int remaining_ms(Deadline deadline) {
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (left.count() < 0) return 0;
    if (left.count() > INT32_MAX) return INT32_MAX;
    return static_cast<int>(left.count());
}

int wait_for(int fd, short events, Deadline deadline) {
    for (;;) {
        struct pollfd pfd{};
        pfd.fd = fd;
        pfd.events = events;
        int rc = ::poll(&pfd, 1, remaining_ms(deadline));
        if (rc < 0) {
            if (errno == EINTR) continue;
            return -1;
        }
        return rc > 0 ? 1 : 0;
    }
}

void set_nonblocking(int fd, bool on) {
    int flags = ::fcntl(fd, F_GETFL, 0);
    if (flags < 0) return;
    if (on)
        ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
    else
        ::fcntl(fd, F_SETFL, flags & ~O_NONBLOCK);
}

}  // namespace

int wait_readable(int fd, Deadline deadline) { return wait_for(fd, POLLIN, deadline); }
int wait_writable(int fd, Deadline deadline) { return wait_for(fd, POLLOUT, deadline); }

IoResult read_some(int fd, char* buf, size_t len, Deadline deadline) {
    int ready = wait_readable(fd, deadline);
    if (ready < 0) return {IoStatus::error, 0};
    if (ready == 0) return {IoStatus::timeout, 0};
    for (;;) {
        ssize_t n = ::recv(fd, buf, len, 0);
        if (n > 0) return {IoStatus::ok, static_cast<size_t>(n)};
        if (n == 0) return {IoStatus::eof, 0};
        if (errno == EINTR) continue;
        if (errno == ECONNRESET) return {IoStatus::reset, 0};
        return {IoStatus::error, 0};
    }
}

IoStatus write_all(int fd, std::string_view data, Deadline deadline) {
    size_t off = 0;
    while (off < data.size()) {
        int ready = wait_writable(fd, deadline);
        if (ready < 0) return IoStatus::error;
        if (ready == 0) return IoStatus::timeout;
        ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
        if (n >= 0) {
            off += static_cast<size_t>(n);
            continue;
        }
        if (errno == EINTR || errno == EAGAIN || errno == EWOULDBLOCK) continue;
        if (errno == ECONNRESET || errno == EPIPE) return IoStatus::reset;
        return IoStatus::error;
    }
    return IoStatus::ok;
}

LineResult read_line(int fd, Deadline deadline, size_t max_len) {
    LineResult out;
    while (out.line.size() < max_len) {
        char c;
        IoResult r = read_some(fd, &c, 1, deadline);
        if (r.status != IoStatus::ok) {
            out.status = r.status;
            return out;
        }
        if (c == '\n') {
            if (!out.line.empty() && out.line.back() == '\r') out.line.pop_back();
            out.status = IoStatus::ok;
            return out;
        }
        out.line.push_back(c);
    }
    out.status = IoStatus::error;
    return out;
}

std::string_view to_string(ConnectStatus s) {
    switch (s) {
        case ConnectStatus::ok: return "ok";
        case ConnectStatus::refused: return "refused";
        case ConnectStatus::timeout: return "timeout";
        case ConnectStatus::unreachable: return "unreachable";
        case ConnectStatus::error: return "error";
    }
    return "error";
}

std::string_view to_string(PingStatus s) {
    switch (s) {
        case PingStatus::ok: return "ok";
        case PingStatus::timeout: return "timeout";
        case PingStatus::unreachable: return "unreachable";
        case PingStatus::capability_missing: return "capability_missing";
    }
    return "capability_missing";
}

ConnectResult tcp_connect(const std::string& host, std::uint16_t port, Deadline deadline) {
    struct addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    struct addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        return {ConnectStatus::error, Socket{}};

    Socket sock(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
    if (!sock.valid()) {
        ::freeaddrinfo(res);
        return {ConnectStatus::error, Socket{}};
    }
    set_nonblocking(sock.fd(), true);
    int rc = ::connect(sock.fd(), res->ai_addr, res->ai_addrlen);
    ::freeaddrinfo(res);
    if (rc != 0 && errno != EINPROGRESS) {
        if (errno == ECONNREFUSED) return {ConnectStatus::refused, Socket{}};
        if (errno == ENETUNREACH || errno == EHOSTUNREACH)
            return {ConnectStatus::unreachable, Socket{}};
        return {ConnectStatus::error, Socket{}};
    }
    if (rc != 0) {
        int ready = wait_writable(sock.fd(), deadline);
        if (ready < 0) return {ConnectStatus::error, Socket{}};
        if (ready == 0) return {ConnectStatus::timeout, Socket{}};
        int err = 0;
        socklen_t len = sizeof(err);
        if (::getsockopt(sock.fd(), SOL_SOCKET, SO_ERROR, &err, &len) != 0)
            return {ConnectStatus::error, Socket{}};
        if (err != 0) {
            if (err == ECONNREFUSED) return {ConnectStatus::refused, Socket{}};
            if (err == ETIMEDOUT) return {ConnectStatus::timeout, Socket{}};
            if (err == ENETUNREACH || err == EHOSTUNREACH)
                return {ConnectStatus::unreachable, Socket{}};
            return {ConnectStatus::error, Socket{}};
        }
    }
    set_nonblocking(sock.fd(), false);
    return {ConnectStatus::ok, std::move(sock)};
}

std::optional<Listener> listen_loopback(std::uint16_t port) {
    Socket sock(::socket(AF_INET, SOCK_STREAM, 0));
    if (!sock.valid()) return std::nullopt;
    int one = 1;
    ::setsockopt(sock.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    struct sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(port);
    if (::bind(sock.fd(), reinterpret_cast<struct sockaddr*>(&addr), sizeof(addr)) != 0)
        return std::nullopt;
    if (::listen(sock.fd(), 64) != 0) return std::nullopt;
    socklen_t len = sizeof(addr);
    if (::getsockname(sock.fd(), reinterpret_cast<struct sockaddr*>(&addr), &len) != 0)
        return std::nullopt;
    Listener out;
    out.sock = std::move(sock);
    out.port = ntohs(addr.sin_port);
    return out;
}

Socket accept_conn(int listen_fd, Deadline deadline) {
    int ready = wait_readable(listen_fd, deadline);
    if (ready <= 0) return Socket{};
    int fd = ::accept(listen_fd, nullptr, nullptr);
    return Socket(fd);
}

namespace {

ConnectResult relay_connect(const std::string& relay_addr, const Ipv4& ip, std::uint16_t port,
                            Deadline deadline) {
    auto hp = strings::split_host_port(relay_addr);
    if (!hp) return {ConnectStatus::error, Socket{}};
    ConnectResult up = tcp_connect(hp->first, hp->second, deadline);
    if (up.status != ConnectStatus::ok) return {ConnectStatus::error, Socket{}};

    std::string req = "CONNECT " + ip.to_string() + " " + std::to_string(port) + "\r\n";
    if (write_all(up.sock.fd(), req, deadline) != IoStatus::ok)
        return {ConnectStatus::error, Socket{}};
    LineResult line = read_line(up.sock.fd(), deadline);
    if (line.status == IoStatus::timeout) return {ConnectStatus::timeout, Socket{}};
    if (line.status != IoStatus::ok) return {ConnectStatus::error, Socket{}};
    if (line.line == relay::kOk) return {ConnectStatus::ok, std::move(up.sock)};
    if (line.line == relay::kErrRefused) return {ConnectStatus::refused, Socket{}};
    if (line.line == relay::kErrUnreachable) return {ConnectStatus::unreachable, Socket{}};
    return {ConnectStatus::error, Socket{}};
}

PingStatus relay_ping(const std::string& relay_addr, const Ipv4& ip, Deadline deadline) {
    auto hp = strings::split_host_port(relay_addr);
    if (!hp) return PingStatus::capability_missing;
    ConnectResult up = tcp_connect(hp->first, hp->second, deadline);
    if (up.status != ConnectStatus::ok) return PingStatus::capability_missing;
    std::string req = "PING " + ip.to_string() + "\r\n";
    if (write_all(up.sock.fd(), req, deadline) != IoStatus::ok)
        return PingStatus::capability_missing;
    LineResult line = read_line(up.sock.fd(), deadline);
    if (line.status == IoStatus::timeout) return PingStatus::timeout;
    if (line.status != IoStatus::ok) return PingStatus::capability_missing;
    if (line.line == relay::kOk) return PingStatus::ok;
    if (line.line == relay::kErrUnreachable) return PingStatus::unreachable;
    return PingStatus::capability_missing;
}

uint16_t icmp_checksum(const void* data, size_t len) {
    const auto* p = static_cast<const uint8_t*>(data);
    uint32_t sum = 0;
    while (len > 1) {
        sum += static_cast<uint32_t>(p[0]) << 8 | p[1];
        p += 2;
        len -= 2;
    }
    if (len == 1) sum += static_cast<uint32_t>(p[0]) << 8;
    while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<uint16_t>(~sum);
}

PingStatus icmp_ping(const Ipv4& ip, Deadline deadline) {
    Socket sock(::socket(AF_INET, SOCK_DGRAM, IPPROTO_ICMP));
    if (!sock.valid()) {
        // Unprivileged ICMP sockets are often disallowed (net.ipv4.ping_group_range).
        return PingStatus::capability_missing;
    }
    struct sockaddr_in dst{};
    dst.sin_family = AF_INET;
    dst.sin_addr.s_addr = htonl(ip.value());

    uint8_t pkt[24] = {};
    pkt[0] = ICMP_ECHO;
    pkt[6] = 0;
    pkt[7] = 1;  // sequence
    uint16_t csum = icmp_checksum(pkt, sizeof(pkt));
    pkt[2] = static_cast<uint8_t>(csum >> 8);
    pkt[3] = static_cast<uint8_t>(csum & 0xff);

    ssize_t n = ::sendto(sock.fd(), pkt, sizeof(pkt), 0,
                         reinterpret_cast<struct sockaddr*>(&dst), sizeof(dst));
    if (n < 0) {
        if (errno == ENETUNREACH || errno == EHOSTUNREACH) return PingStatus::unreachable;
        return PingStatus::capability_missing;
    }
    for (;;) {
        int ready = wait_readable(sock.fd(), deadline);
        if (ready < 0) return PingStatus::capability_missing;
        if (ready == 0) return PingStatus::timeout;
        uint8_t buf[512];
        ssize_t got = ::recv(sock.fd(), buf, sizeof(buf), 0);
        if (got < 0) {
            if (errno == EINTR) continue;
            if (errno == ENETUNREACH || errno == EHOSTUNREACH) return PingStatus::unreachable;
            return PingStatus::capability_missing;
        }
        if (got >= 1 && buf[0] == ICMP_ECHOREPLY) return PingStatus::ok;
    }
}

}  // namespace

ConnectResult Vantage::connect(const Ipv4& ip, std::uint16_t port,
                               std::chrono::milliseconds timeout) const {
    Deadline deadline = deadline_in(timeout);
    if (spec_.kind == VantageSpec::Kind::relay)
        return relay_connect(spec_.address, ip, port, deadline);
    return tcp_connect(ip.to_string(), port, deadline);
}

PingStatus Vantage::ping(const Ipv4& ip, std::chrono::milliseconds timeout) const {
    if (!spec_.icmp_enabled) return PingStatus::capability_missing;
    Deadline deadline = deadline_in(timeout);
    if (spec_.kind == VantageSpec::Kind::relay)
        return relay_ping(spec_.address, ip, deadline);
    return icmp_ping(ip, deadline);
}

}  // namespace cenprobe::net
