#include "cenprobe/sni_probe.hpp"

#include <algorithm>
#include <map>
#include <thread>

namespace cenprobe {

namespace {

SniAttempt one_attempt(tls::SslCtxPtr& ctx, const net::Vantage& vantage, const Domain& domain,
                       const Ipv4& ip, const SniProbeConfig& cfg) {
    SniAttempt att;
    auto conn = vantage.connect(ip, cfg.port, cfg.timeout);
    att.connect = conn.status;
    if (conn.status != net::ConnectStatus::ok) return att;
    att.handshake = tls::client_handshake(ctx.get(), conn.sock.fd(), domain.name(),
                                          net::deadline_in(cfg.timeout));
    return att;
}

std::vector<SniAttempt> run_attempts(tls::SslCtxPtr& ctx, const net::Vantage& vantage,
                                     const Domain& domain, const Ipv4& ip,
                                     const SniProbeConfig& cfg) {
    std::vector<SniAttempt> out;
    for (int i = 0; i < std::max(1, cfg.attempts); ++i) {
        if (i > 0 && cfg.retry_delay.count() > 0) std::this_thread::sleep_for(cfg.retry_delay);
        out.push_back(one_attempt(ctx, vantage, domain, ip, cfg));
        if (out.back().ok()) break;
    }
    return out;
}

bool any_ok(const std::vector<SniAttempt>& attempts) {
    return std::any_of(attempts.begin(), attempts.end(),
                       [](const SniAttempt& a) { return a.ok(); });
}

std::string dominant_failure(const std::vector<SniAttempt>& attempts) {
    std::map<std::string, size_t> counts;
    for (const SniAttempt& a : attempts) {
        std::string key = a.connect != net::ConnectStatus::ok
                              ? "connect_" + std::string(net::to_string(a.connect))
                              : "handshake_" + std::string(tls::to_string(a.handshake));
        ++counts[key];
    }
    std::string best;
    size_t best_count = 0;
    for (const SniAttempt& a : attempts) {
        std::string key = a.connect != net::ConnectStatus::ok
                              ? "connect_" + std::string(net::to_string(a.connect))
                              : "handshake_" + std::string(tls::to_string(a.handshake));
        if (counts[key] > best_count) {
            best = key;
            best_count = counts[key];
        }
    }
    return best;
}

}  // namespace

void finish_sni_record(SniProbeRecord& rec) {
    if (any_ok(rec.test_attempts)) {
        rec.verdict = Verdict::uncensored;
        rec.evidence.clear();
        return;
    }
    if (rec.test_attempts.empty() || !any_ok(rec.control_attempts)) {
        rec.verdict = Verdict::untestable;
        rec.evidence.clear();
        rec.note = rec.test_attempts.empty() ? "no_attempts" : "control_failed";
        return;
    }
    rec.verdict = Verdict::censored;
    rec.evidence = "sni_handshake";
    rec.note = dominant_failure(rec.test_attempts);
}

SniProbeRecord probe_sni(const net::Vantage& test, const net::Vantage& control,
                         const Domain& domain, const Ipv4& reflector_ip,
                         const SniProbeConfig& cfg) {
    tls::SslCtxPtr ctx = tls::make_client_ctx();

    SniProbeRecord rec;
    rec.domain = domain;
    rec.reflector_ip = reflector_ip;
    rec.test_attempts = run_attempts(ctx, test, domain, reflector_ip, cfg);
    if (!any_ok(rec.test_attempts))
        rec.control_attempts = run_attempts(ctx, control, domain, reflector_ip, cfg);
    finish_sni_record(rec);
    return rec;
}

}  // namespace cenprobe
