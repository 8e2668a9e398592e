#include "cenprobe/sim/dns_sim.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>

#include "cenprobe/dns_wire.hpp"
#include "cenprobe/strings.hpp"

namespace cenprobe::sim {

bool DnsSimServer::start() {
    net::Socket sock(::socket(AF_INET, SOCK_DGRAM, 0));
    if (!sock.valid()) return false;
    struct sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(sock.fd(), reinterpret_cast<struct sockaddr*>(&addr), sizeof(addr)) != 0)
        return false;
    socklen_t len = sizeof(addr);
    if (::getsockname(sock.fd(), reinterpret_cast<struct sockaddr*>(&addr), &len) != 0)
        return false;
    port_ = ntohs(addr.sin_port);
    sock_ = std::move(sock);
    stopping_ = false;
    thread_ = std::thread([this] { loop(); });
    return true;
}

void DnsSimServer::stop() {
    stopping_ = true;
    if (thread_.joinable()) thread_.join();
    sock_.close();
}

void DnsSimServer::loop() {
    while (!stopping_) {
        int ready = net::wait_readable(sock_.fd(), net::deadline_in(std::chrono::milliseconds(50)));
        if (ready <= 0) continue;
        std::uint8_t buf[1500];
        struct sockaddr_in peer{};
        socklen_t peer_len = sizeof(peer);
        ssize_t n = ::recvfrom(sock_.fd(), buf, sizeof(buf), 0,
                               reinterpret_cast<struct sockaddr*>(&peer), &peer_len);
        if (n <= 0) continue;
        auto query = dns::wire::parse_query(
            std::string_view(reinterpret_cast<const char*>(buf), static_cast<size_t>(n)));
        if (!query) continue;

        std::string qname = strings::to_lower(query->qname);
        if (cfg_.transcript) cfg_.transcript->record("dns:" + cfg_.id, "dns_query", qname);

        std::vector<dns::wire::AnswerRecord> answers;
        int rcode = 0;

        const DnsRule* rule = nullptr;
        if (cfg_.apply_rules && cfg_.scenario) {
            auto it = cfg_.scenario->dns_rules.find(qname);
            if (it != cfg_.scenario->dns_rules.end()) rule = &it->second;
        }

        if (rule) {
            if (cfg_.transcript)
                cfg_.transcript->record("dns:" + cfg_.id, "dns_rule",
                                        qname + " " + std::string(to_string(rule->action)));
            switch (rule->action) {
                case DnsRule::Action::nxdomain: rcode = 3; break;
                case DnsRule::Action::servfail: rcode = 2; break;
                case DnsRule::Action::refused: rcode = 5; break;
                case DnsRule::Action::timeout: continue;  // swallow the query
                case DnsRule::Action::bogon:
                case DnsRule::Action::inject: {
                    auto ip = Ipv4::parse(rule->ip);
                    if (ip) answers.push_back({query->qname, *ip, cfg_.ttl});
                    break;
                }
            }
        } else {
            auto it = cfg_.zone.find(qname);
            if (it != cfg_.zone.end() && query->qtype == 1)
                answers.push_back({query->qname, it->second, cfg_.ttl});
            else
                rcode = 3;
        }

        std::string out = dns::wire::encode_response(*query, answers, rcode);
        ::sendto(sock_.fd(), out.data(), out.size(), 0,
                 reinterpret_cast<struct sockaddr*>(&peer), peer_len);
    }
}

}  // namespace cenprobe::sim
