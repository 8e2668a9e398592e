#include "cenprobe/tcp_probe.hpp"

#include <algorithm>
#include <map>
#include <thread>

namespace cenprobe {

namespace {

void default_sleep(std::chrono::milliseconds ms) { std::this_thread::sleep_for(ms); }

std::vector<net::ConnectStatus> run_attempts(const net::Vantage& vantage, const Ipv4& ip,
                                             std::uint16_t port, const TcpProbeConfig& cfg,
                                             const SleepFn& sleep) {
    std::vector<net::ConnectStatus> attempts;
    int max_attempts = 1 + std::max(0, cfg.retries);
    for (int i = 0; i < max_attempts; ++i) {
        if (i > 0) sleep(cfg.retry_delay);
        auto res = vantage.connect(ip, port, cfg.connect_timeout);
        attempts.push_back(res.status);
        if (res.status == net::ConnectStatus::ok) break;
    }
    return attempts;
}

bool any_ok(const std::vector<net::ConnectStatus>& attempts) {
    return std::any_of(attempts.begin(), attempts.end(),
                       [](net::ConnectStatus s) { return s == net::ConnectStatus::ok; });
}

std::string dominant_failure(const std::vector<net::ConnectStatus>& attempts) {
    std::map<net::ConnectStatus, size_t> counts;
    for (auto s : attempts) ++counts[s];
    net::ConnectStatus best = attempts.front();
    size_t best_count = 0;
    for (auto s : attempts) {  // first-seen wins ties
        if (counts[s] > best_count) {
            best = s;
            best_count = counts[s];
        }
    }
    return "tcp_" + std::string(net::to_string(best));
}

}  // namespace

void finish_tcp_record(TcpProbeRecord& rec) {
    if (any_ok(rec.test_attempts)) {
        rec.verdict = Verdict::uncensored;
        rec.evidence.clear();
        return;
    }
    if (rec.test_attempts.empty() || !any_ok(rec.control_attempts)) {
        rec.verdict = Verdict::untestable;
        rec.evidence.clear();
        rec.note = rec.test_attempts.empty() ? "no_attempts" : "control_unreachable";
        return;
    }
    rec.verdict = Verdict::censored;
    rec.evidence = dominant_failure(rec.test_attempts);
}

TcpProbeRecord probe_tcp(const net::Vantage& test, const net::Vantage& control,
                         const Domain& domain, const Ipv4& ip, std::uint16_t port,
                         const TcpProbeConfig& cfg, const SleepFn& sleep) {
    const SleepFn& do_sleep = sleep ? sleep : SleepFn(default_sleep);

    TcpProbeRecord rec;
    rec.domain = domain;
    rec.ip = ip;
    rec.port = port;

    if (cfg.ping_first) {
        rec.ping = test.ping(ip, cfg.ping_timeout);
        rec.ping_ran = true;
        if (rec.ping == net::PingStatus::capability_missing) rec.note = "ping_unavailable";
    }

    rec.test_attempts = run_attempts(test, ip, port, cfg, do_sleep);
    if (any_ok(rec.test_attempts)) {
        finish_tcp_record(rec);
        return rec;
    }
    rec.control_attempts = run_attempts(control, ip, port, cfg, do_sleep);
    finish_tcp_record(rec);
    return rec;
}

}  // namespace cenprobe
