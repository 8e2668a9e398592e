#include "cenprobe/sim/relay.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <thread>

#include "cenprobe/strings.hpp"
#include "cenprobe/tls_util.hpp"

namespace cenprobe::sim {

namespace {

constexpr std::chrono::milliseconds kIoTimeout{5'000};
constexpr std::chrono::milliseconds kSpliceIdle{10'000};

// Bidirectional byte pump until both directions are done or idle too long.
void splice(int a, int b, std::chrono::milliseconds idle) {
    bool a_open = true, b_open = true;
    while (a_open || b_open) {
        struct pollfd fds[2];
        fds[0] = {a, static_cast<short>(a_open ? POLLIN : 0), 0};
        fds[1] = {b, static_cast<short>(b_open ? POLLIN : 0), 0};
        int rc = ::poll(fds, 2, static_cast<int>(idle.count()));
        if (rc <= 0) return;  // idle or error
        char buf[16 * 1024];
        if (a_open && (fds[0].revents & (POLLIN | POLLHUP | POLLERR))) {
            ssize_t n = ::recv(a, buf, sizeof(buf), 0);
            if (n <= 0) {
                a_open = false;
                ::shutdown(b, SHUT_WR);
            } else if (net::write_all(b, {buf, static_cast<size_t>(n)},
                                      net::deadline_in(idle)) != net::IoStatus::ok) {
                return;
            }
        }
        if (b_open && (fds[1].revents & (POLLIN | POLLHUP | POLLERR))) {
            ssize_t n = ::recv(b, buf, sizeof(buf), 0);
            if (n <= 0) {
                b_open = false;
                ::shutdown(a, SHUT_WR);
            } else if (net::write_all(a, {buf, static_cast<size_t>(n)},
                                      net::deadline_in(idle)) != net::IoStatus::ok) {
                return;
            }
        }
    }
}

std::string default_blockpage() {
    return "<html><head><title>Access Denied</title></head><body>"
           "<h1>This website has been blocked by order of the network operator.</h1>"
           "</body></html>";
}

std::string simple_response(int status, const std::string& reason, const std::string& body,
                            const std::string& extra_header = {}) {
    std::string out = "HTTP/1.1 " + std::to_string(status) + " " + reason + "\r\n";
    out += "Server: gateway/1.0\r\n";
    if (!extra_header.empty()) out += extra_header + "\r\n";
    if (!body.empty()) out += "Content-Type: text/html\r\n";
    out += "Content-Length: " + std::to_string(body.size()) + "\r\n";
    out += "Connection: close\r\n\r\n";
    out += body;
    return out;
}

}  // namespace

void RelayServer::record(const std::string& kind, const std::string& detail) {
    if (cfg_.transcript) cfg_.transcript->record("relay:" + cfg_.id, kind, detail);
}

void RelayServer::handle(net::Socket conn) {
    auto line = net::read_line(conn.fd(), net::deadline_in(kIoTimeout));
    if (line.status != net::IoStatus::ok) return;

    auto parts = strings::split(line.line, ' ');
    if (parts.size() == 2 && parts[0] == "PING") {
        auto ip = Ipv4::parse(parts[1]);
        if (!ip) return;
        record("ping", parts[1]);
        bool known = false;
        for (const auto& [key, target] : cfg_.routes)
            if (key.first == *ip) known = true;
        std::string reply = known ? std::string(net::relay::kOk)
                                  : std::string(net::relay::kErrUnreachable);
        net::write_all(conn.fd(), reply + "\n", net::deadline_in(kIoTimeout));
        return;
    }
    if (parts.size() == 3 && parts[0] == "CONNECT") {
        auto ip = Ipv4::parse(parts[1]);
        std::uint16_t port = 0;
        try {
            int p = std::stoi(parts[2]);
            if (p < 1 || p > 65535) return;
            port = static_cast<std::uint16_t>(p);
        } catch (...) {
            return;
        }
        if (!ip) return;
        handle_connect(conn, *ip, port);
    }
}

void RelayServer::handle_connect(net::Socket& conn, const Ipv4& ip, std::uint16_t port) {
    std::string endpoint = ip.to_string() + ":" + std::to_string(port);
    record("connect", endpoint);

    if (cfg_.censoring) {
        auto dit = cfg_.ip_domains.find(ip);
        if (dit != cfg_.ip_domains.end()) {
            auto rit = cfg_.scenario->tcp_rules.find(dit->second);
            if (rit != cfg_.scenario->tcp_rules.end() &&
                (rit->second.port == 0 || rit->second.port == port)) {
                if (rit->second.action == TcpRule::Action::refuse) {
                    record("tcp_refuse", endpoint);
                    net::write_all(conn.fd(), std::string(net::relay::kErrRefused) + "\n",
                                   net::deadline_in(kIoTimeout));
                } else {
                    record("tcp_drop", endpoint);
                    // SYN blackhole: say nothing until the client gives up.
                    char c;
                    net::read_some(conn.fd(), &c, 1, net::deadline_in(cfg_.silence));
                }
                return;
            }
        }
    }

    auto route = cfg_.routes.find({ip, port});
    if (route == cfg_.routes.end()) {
        net::write_all(conn.fd(), std::string(net::relay::kErrUnreachable) + "\n",
                       net::deadline_in(kIoTimeout));
        return;
    }
    if (net::write_all(conn.fd(), std::string(net::relay::kOk) + "\n",
                       net::deadline_in(kIoTimeout)) != net::IoStatus::ok)
        return;

    if (cfg_.censoring && port == 80) {
        run_http_middlebox(conn, route->second);
        return;
    }
    if (cfg_.censoring && port == 443) {
        run_sni_filter(conn, route->second);
        return;
    }
    forward(conn, route->second, {});
}

void RelayServer::forward(net::Socket& client, std::uint16_t upstream_port,
                          const std::string& buffered) {
    auto up = net::tcp_connect("127.0.0.1", upstream_port, net::deadline_in(kIoTimeout));
    if (up.status != net::ConnectStatus::ok) {
        client.close_with_rst();
        return;
    }
    if (!buffered.empty() &&
        net::write_all(up.sock.fd(), buffered, net::deadline_in(kIoTimeout)) !=
            net::IoStatus::ok)
        return;
    splice(client.fd(), up.sock.fd(), kSpliceIdle);
}

void RelayServer::run_http_middlebox(net::Socket& conn, std::uint16_t upstream_port) {
    // Accumulate the request head exactly as an on-path box would.
    std::string head;
    char buf[4096];
    while (head.find("\r\n\r\n") == std::string::npos) {
        auto r = net::read_some(conn.fd(), buf, sizeof(buf), net::deadline_in(kIoTimeout));
        if (r.status != net::IoStatus::ok) return;
        head.append(buf, r.n);
        if (head.size() > 64 * 1024) return;
    }

    std::string host;
    for (const auto& raw : strings::split(head.substr(0, head.find("\r\n\r\n")), '\n')) {
        std::string l = strings::trim(raw);
        if (strings::starts_with(strings::to_lower(l), "host:"))
            host = strings::trim(l.substr(5));
    }
    if (auto colon = host.rfind(':'); colon != std::string::npos) host = host.substr(0, colon);
    host = strings::to_lower(host);
    record("http_request", host);

    auto rit = cfg_.scenario->http_rules.find(host);
    if (rit != cfg_.scenario->http_rules.end()) {
        const HttpRule& rule = rit->second;
        record("http_rule", host + " " + std::string(to_string(rule.action)));
        switch (rule.action) {
            case HttpRule::Action::rst:
                record("rst", host);
                conn.close_with_rst();
                return;
            case HttpRule::Action::blockpage: {
                int status = rule.status ? rule.status : 200;
                std::string body = rule.body.empty() ? default_blockpage() : rule.body;
                net::write_all(conn.fd(), simple_response(status, "OK", body),
                               net::deadline_in(kIoTimeout));
                return;
            }
            case HttpRule::Action::redirect: {
                int status = rule.status ? rule.status : 302;
                net::write_all(conn.fd(),
                               simple_response(status, "Found", "",
                                               "Location: " + rule.target),
                               net::deadline_in(kIoTimeout));
                return;
            }
            case HttpRule::Action::error: {
                int status = rule.status ? rule.status : 403;
                std::string body = rule.body.empty()
                                       ? "<html><body>forbidden</body></html>"
                                       : rule.body;
                net::write_all(conn.fd(), simple_response(status, "Forbidden", body),
                               net::deadline_in(kIoTimeout));
                return;
            }
            case HttpRule::Action::timeout: {
                char c;
                net::read_some(conn.fd(), &c, 1, net::deadline_in(cfg_.silence));
                return;
            }
        }
    }
    forward(conn, upstream_port, head);
}

void RelayServer::run_sni_filter(net::Socket& conn, std::uint16_t upstream_port) {
    std::string bytes;
    std::string sni;
    tls::SniPeek peek = tls::SniPeek::need_more;
    char buf[4096];
    while (peek == tls::SniPeek::need_more && bytes.size() < 64 * 1024) {
        auto r = net::read_some(conn.fd(), buf, sizeof(buf), net::deadline_in(kIoTimeout));
        if (r.status != net::IoStatus::ok) return;
        bytes.append(buf, r.n);
        peek = tls::peek_client_hello_sni(bytes, sni);
    }
    if (peek == tls::SniPeek::found) {
        record("clienthello", sni);
        if (cfg_.scenario->sni_blocklist.count(strings::to_lower(sni))) {
            record("rst", sni);
            conn.close_with_rst();
            return;
        }
    }
    forward(conn, upstream_port, bytes);
}

}  // namespace cenprobe::sim
