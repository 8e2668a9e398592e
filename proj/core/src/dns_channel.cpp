#include "cenprobe/dns_channel.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <random>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "cenprobe/dns_wire.hpp"
#include "cenprobe/net.hpp"
#include "cenprobe/strings.hpp"

namespace cenprobe {

std::string_view to_string(ChannelSpec::Kind k) {
    return k == ChannelSpec::Kind::doh ? "doh" : "udp53";
}

std::optional<ChannelSpec::Kind> channel_kind_from_string(std::string_view s) {
    if (s == "udp53") return ChannelSpec::Kind::udp53;
    if (s == "doh") return ChannelSpec::Kind::doh;
    return std::nullopt;
}

namespace {

std::uint16_t random_txid() {
    static thread_local std::mt19937 rng{std::random_device{}()};
    return static_cast<std::uint16_t>(rng() & 0xffff);
}

DnsOutcome outcome_from_response(const dns::wire::ParsedResponse& resp, const Domain& domain,
                                 std::uint32_t* min_ttl_out) {
    if (min_ttl_out) *min_ttl_out = resp.min_ttl.value_or(0);
    if (resp.rcode == 3) return DnsOutcome::error(RCode::nxdomain);
    if (resp.rcode == 2) return DnsOutcome::error(RCode::servfail);
    if (resp.rcode == 5) return DnsOutcome::error(RCode::refused);
    if (resp.rcode != 0) return DnsOutcome::error(RCode::other);
    if (resp.a_records.empty()) {
        // NOERROR with no usable A record (NODATA / CNAME-only chain).
        return DnsOutcome::error(RCode::other);
    }
    (void)domain;
    return DnsOutcome::answers(resp.a_records, resp.min_ttl);
}

DnsOutcome resolve_tcp(const std::string& host, std::uint16_t port, const std::string& query,
                       std::uint16_t txid, const Domain& domain, net::Deadline deadline,
                       std::uint32_t* min_ttl_out) {
    auto conn = net::tcp_connect(host, port, deadline);
    if (conn.status != net::ConnectStatus::ok) return DnsOutcome::timeout();

    std::string framed;
    framed.push_back(static_cast<char>(query.size() >> 8));
    framed.push_back(static_cast<char>(query.size() & 0xff));
    framed += query;
    if (net::write_all(conn.sock.fd(), framed, deadline) != net::IoStatus::ok)
        return DnsOutcome::timeout();

    std::string buf;
    char chunk[2048];
    size_t want = 2;
    for (;;) {
        auto r = net::read_some(conn.sock.fd(), chunk, sizeof(chunk), deadline);
        if (r.status != net::IoStatus::ok) return DnsOutcome::timeout();
        buf.append(chunk, r.n);
        if (buf.size() >= 2 && want == 2)
            want = 2 + ((static_cast<size_t>(static_cast<unsigned char>(buf[0])) << 8) |
                        static_cast<unsigned char>(buf[1]));
        if (want > 2 && buf.size() >= want) break;
    }
    auto resp = dns::wire::parse_response(std::string_view(buf).substr(2, want - 2));
    if (!resp || resp->id != txid || !strings::iequals(resp->qname, domain.name()))
        return DnsOutcome::timeout();
    return outcome_from_response(*resp, domain, min_ttl_out);
}

DnsOutcome resolve_udp(const ChannelSpec& channel, const Domain& domain,
                       std::chrono::milliseconds timeout, std::uint32_t* min_ttl_out) {
    auto hp = strings::split_host_port(channel.address);
    if (!hp) return DnsOutcome::timeout();
    const auto& [host, port] = *hp;

    net::Deadline deadline = net::deadline_in(timeout);
    std::uint16_t txid = random_txid();
    std::string query = dns::wire::encode_query(txid, domain.name());

    net::Socket sock(::socket(AF_INET, SOCK_DGRAM, 0));
    if (!sock.valid()) return DnsOutcome::timeout();

    struct sockaddr_in dst{};
    dst.sin_family = AF_INET;
    dst.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &dst.sin_addr) != 1) return DnsOutcome::timeout();

    if (::sendto(sock.fd(), query.data(), query.size(), 0,
                 reinterpret_cast<struct sockaddr*>(&dst), sizeof(dst)) < 0)
        return DnsOutcome::timeout();

    // Replies that fail the txid/qname check are discarded and the wait
    // continues, so an off-path spoof cannot shorten the timeout.
    for (;;) {
        int ready = net::wait_readable(sock.fd(), deadline);
        if (ready <= 0) return DnsOutcome::timeout();
        std::uint8_t buf[4096];
        ssize_t n = ::recv(sock.fd(), buf, sizeof(buf), 0);
        if (n < 0) {
            if (errno == EINTR) continue;
            return DnsOutcome::timeout();
        }
        auto resp = dns::wire::parse_response(
            std::string_view(reinterpret_cast<const char*>(buf), static_cast<size_t>(n)));
        if (!resp || !resp->is_response || resp->id != txid ||
            !strings::iequals(resp->qname, domain.name()))
            continue;
        if (resp->truncated)
            return resolve_tcp(host, port, query, txid, domain, deadline, min_ttl_out);
        return outcome_from_response(*resp, domain, min_ttl_out);
    }
}

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

std::optional<UrlParts> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return std::nullopt;
    auto path_start = url.find('/', scheme_end + 3);
    UrlParts out;
    if (path_start == std::string::npos) {
        out.origin = url;
        out.path = "/";
    } else {
        out.origin = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    return out;
}

DnsOutcome resolve_doh(const ChannelSpec& channel, const Domain& domain,
                       std::chrono::milliseconds timeout, std::uint32_t* min_ttl_out) {
    auto parts = split_url(channel.address);
    if (!parts) return DnsOutcome::timeout();

    std::uint16_t txid = 0;  // RFC 8484 wants id 0 for cache friendliness
    std::string query = dns::wire::encode_query(txid, domain.name());

    httplib::Client cli(parts->origin);
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                               (timeout % std::chrono::seconds(1)).count() * 1000);
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                         (timeout % std::chrono::seconds(1)).count() * 1000);
    cli.enable_server_certificate_verification(false);

    std::string path = parts->path;
    path += (path.find('?') == std::string::npos) ? '?' : '&';
    path += "dns=" + strings::base64url_encode(query);

    auto res = cli.Get(path, {{"Accept", "application/dns-message"}});
    if (!res || res->status != 200) return DnsOutcome::timeout();
    auto resp = dns::wire::parse_response(res->body);
    if (!resp || resp->id != txid || !strings::iequals(resp->qname, domain.name()))
        return DnsOutcome::timeout();
    return outcome_from_response(*resp, domain, min_ttl_out);
}

DnsOutcome resolve_impl(const ChannelSpec& channel, const Domain& domain,
                        std::chrono::milliseconds timeout, std::uint32_t* min_ttl_out) {
    if (channel.kind == ChannelSpec::Kind::doh)
        return resolve_doh(channel, domain, timeout, min_ttl_out);
    return resolve_udp(channel, domain, timeout, min_ttl_out);
}

}  // namespace

DnsOutcome resolve_via_channel(const ChannelSpec& channel, const Domain& domain,
                               std::chrono::milliseconds timeout) {
    return resolve_impl(channel, domain, timeout, nullptr);
}

std::optional<DnsOutcome> ControlCache::get(const std::string& channel_id, const Domain& domain) {
    std::lock_guard lock(mu_);
    auto it = entries_.find({channel_id, domain.name()});
    if (it == entries_.end()) return std::nullopt;
    if (std::chrono::steady_clock::now() >= it->second.expires) {
        entries_.erase(it);
        return std::nullopt;
    }
    return it->second.outcome;
}

void ControlCache::put(const std::string& channel_id, const Domain& domain,
                       const DnsOutcome& outcome, std::chrono::seconds ttl) {
    if (outcome.kind != OutcomeKind::answers) return;
    auto life = std::min<std::chrono::seconds>(ttl, max_age_);
    if (life.count() <= 0) return;
    std::lock_guard lock(mu_);
    entries_[{channel_id, domain.name()}] = {outcome, std::chrono::steady_clock::now() + life};
}

size_t ControlCache::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

DnsOutcome resolve_with_cache(ControlCache& cache, const ChannelSpec& channel,
                              const Domain& domain, std::chrono::milliseconds timeout) {
    if (channel.is_control) {
        if (auto hit = cache.get(channel.id, domain)) return *hit;
    }
    std::uint32_t min_ttl = 0;
    DnsOutcome outcome = resolve_impl(channel, domain, timeout, &min_ttl);
    if (channel.is_control && outcome.kind == OutcomeKind::answers)
        cache.put(channel.id, domain, outcome, std::chrono::seconds(min_ttl));
    return outcome;
}

}  // namespace cenprobe
