#include "cenprobe/sim/sim_network.hpp"

#include <set>
#include <stdexcept>

namespace cenprobe::sim {

namespace {

constexpr std::uint32_t kAutoBase = 0x0B000001;       // 11.0.0.1
constexpr std::uint32_t kReflectorAddr = 0x0C000001;  // 12.0.0.1

}  // namespace

SimNetwork::SimNetwork(Scenario scenario, SimNetworkConfig cfg)
    : scenario_(std::move(scenario)), cfg_(cfg), reflector_ip_(kReflectorAddr) {
    std::set<Ipv4> used{reflector_ip_};
    for (const auto& [domain, spec] : scenario_.origins) {
        if (spec.ip.empty()) continue;
        auto ip = Ipv4::parse(spec.ip);
        if (!ip) throw std::runtime_error("scenario: bad origin ip for " + domain);
        if (!used.insert(*ip).second)
            throw std::runtime_error("scenario: duplicate origin ip " + spec.ip);
        origin_ips_[domain] = *ip;
    }
    std::uint32_t next = kAutoBase;
    for (const auto& [domain, spec] : scenario_.origins) {
        if (!spec.ip.empty()) continue;
        while (used.count(Ipv4(next))) ++next;
        Ipv4 ip(next);
        used.insert(ip);
        origin_ips_[domain] = ip;
    }
}

SimNetwork::~SimNetwork() { stop(); }

RouteTable SimNetwork::make_routes(std::uint16_t origin_port) const {
    RouteTable routes;
    for (const auto& [domain, vip] : origin_ips_) {
        routes[{vip, 80}] = origin_port;
        routes[{vip, 443}] = reflector_->port();
    }
    routes[{reflector_ip_, 443}] = reflector_->port();
    return routes;
}

bool SimNetwork::start() {
    if (started_) return true;

    DnsSimServer::Config dns_cfg;
    dns_cfg.scenario = &scenario_;
    dns_cfg.zone = origin_ips_;
    dns_cfg.transcript = &transcript_;

    dns_cfg.id = "test";
    dns_cfg.apply_rules = true;
    test_dns_ = std::make_unique<DnsSimServer>(dns_cfg);
    if (!test_dns_->start()) return false;

    for (size_t i = 0; i < cfg_.control_resolvers; ++i) {
        dns_cfg.id = "c" + std::to_string(i + 1);
        dns_cfg.apply_rules = false;
        auto srv = std::make_unique<DnsSimServer>(dns_cfg);
        if (!srv->start()) return false;
        control_dns_.push_back(std::move(srv));
    }

    reflector_ = std::make_unique<Reflector>(Reflector::Config{"reflector", &transcript_});
    if (!reflector_->start()) return false;

    OriginServer::Config origin_cfg;
    origin_cfg.scenario = &scenario_;
    origin_cfg.transcript = &transcript_;
    origin_cfg.max_jitter = cfg_.max_jitter;

    origin_cfg.id = "test";
    test_origin_ = std::make_unique<OriginServer>(origin_cfg);
    if (!test_origin_->start()) return false;

    for (size_t i = 0; i < cfg_.control_vantages; ++i) {
        origin_cfg.id = "c" + std::to_string(i + 1);
        auto srv = std::make_unique<OriginServer>(origin_cfg);
        if (!srv->start()) return false;
        control_origins_.push_back(std::move(srv));
    }

    std::map<Ipv4, std::string> ip_domains;
    for (const auto& [domain, vip] : origin_ips_) ip_domains[vip] = domain;

    RelayServer::Config relay_cfg;
    relay_cfg.scenario = &scenario_;
    relay_cfg.transcript = &transcript_;
    relay_cfg.ip_domains = ip_domains;
    relay_cfg.silence = cfg_.relay_silence;

    relay_cfg.id = "test";
    relay_cfg.censoring = true;
    relay_cfg.routes = make_routes(test_origin_->port());
    test_relay_ = std::make_unique<RelayServer>(relay_cfg);
    if (!test_relay_->start()) return false;

    for (size_t i = 0; i < cfg_.control_vantages; ++i) {
        relay_cfg.id = "c" + std::to_string(i + 1);
        relay_cfg.censoring = false;
        relay_cfg.routes = make_routes(control_origins_[i]->port());
        auto srv = std::make_unique<RelayServer>(relay_cfg);
        if (!srv->start()) return false;
        control_relays_.push_back(std::move(srv));
    }

    started_ = true;
    return true;
}

void SimNetwork::stop() {
    if (!started_ && !test_dns_) return;
    // Relays first so nothing still forwards into stopping origins.
    for (auto& r : control_relays_) r->stop();
    if (test_relay_) test_relay_->stop();
    for (auto& o : control_origins_) o->stop();
    if (test_origin_) test_origin_->stop();
    if (reflector_) reflector_->stop();
    for (auto& d : control_dns_) d->stop();
    if (test_dns_) test_dns_->stop();
    started_ = false;
}

ChannelSpec SimNetwork::test_channel() const {
    ChannelSpec spec;
    spec.id = "test";
    spec.kind = ChannelSpec::Kind::udp53;
    spec.address = test_dns_->address();
    spec.is_control = false;
    return spec;
}

std::vector<ChannelSpec> SimNetwork::control_channels() const {
    std::vector<ChannelSpec> out;
    for (size_t i = 0; i < control_dns_.size(); ++i) {
        ChannelSpec spec;
        spec.id = "c" + std::to_string(i + 1);
        spec.kind = ChannelSpec::Kind::udp53;
        spec.address = control_dns_[i]->address();
        spec.is_control = true;
        out.push_back(std::move(spec));
    }
    return out;
}

net::VantageSpec SimNetwork::test_vantage() const {
    net::VantageSpec spec;
    spec.id = "test";
    spec.kind = net::VantageSpec::Kind::relay;
    spec.address = test_relay_->address();
    return spec;
}

std::vector<net::VantageSpec> SimNetwork::control_vantages() const {
    std::vector<net::VantageSpec> out;
    for (size_t i = 0; i < control_relays_.size(); ++i) {
        net::VantageSpec spec;
        spec.id = "c" + std::to_string(i + 1);
        spec.kind = net::VantageSpec::Kind::relay;
        spec.address = control_relays_[i]->address();
        out.push_back(std::move(spec));
    }
    return out;
}

}  // namespace cenprobe::sim
