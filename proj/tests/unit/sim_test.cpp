#include <doctest.h>

#include <chrono>
#include <set>

#include "cenprobe/dns_channel.hpp"
#include "cenprobe/html_tf.hpp"
#include "cenprobe/http_client.hpp"
#include "cenprobe/sim/sim_network.hpp"

using namespace cenprobe;
using namespace cenprobe::sim;

namespace {

Ipv4 ip(const char* s) { return Ipv4::parse(s).value(); }

DnsOutcome resolve_on(const DnsSimServer& srv, const char* id, const char* name) {
    ChannelSpec spec{id, ChannelSpec::Kind::udp53, srv.address(), false};
    return resolve_via_channel(spec, *Domain::parse(name), std::chrono::milliseconds(2'000));
}

}  // namespace

TEST_CASE("scenario parsing accepts the full schema") {
    auto sc = parse_scenario_text(R"({
        "seed": 42,
        "origins": {
            "a.example": {"ip": "11.1.1.1", "status": 200, "body": "<html></html>"},
            "b.example": {"status": 301, "redirect": "https://b2.example/"},
            "c.example": {"status": 404, "headers": {"X-Err": "1"}}
        },
        "dns_rules": {
            "a.example": {"action": "inject", "ip": "99.83.178.7"},
            "b.example": {"action": "nxdomain"}
        },
        "http_rules": {"a.example": {"action": "blockpage", "status": 200}},
        "sni_blocklist": ["a.example"],
        "tcp_rules": {"c.example": {"action": "refuse", "port": 80}}
    })");
    CHECK(sc.seed == 42);
    CHECK(sc.origins.size() == 3);
    CHECK(sc.origins.at("a.example").ip == "11.1.1.1");
    CHECK(sc.origins.at("b.example").redirect == "https://b2.example/");
    CHECK(sc.dns_rules.at("a.example").action == DnsRule::Action::inject);
    CHECK(sc.dns_rules.at("a.example").ip == "99.83.178.7");
    CHECK(sc.http_rules.at("a.example").action == HttpRule::Action::blockpage);
    CHECK(sc.sni_blocklist.count("a.example") == 1);
    CHECK(sc.tcp_rules.at("c.example").port == 80);
}

TEST_CASE("scenario validation rejects bad input") {
    CHECK_THROWS_AS(parse_scenario_text("[]"), std::runtime_error);
    CHECK_THROWS_AS(parse_scenario_text("{not json"), std::runtime_error);
    // bad origin ip
    CHECK_THROWS_AS(parse_scenario_text(R"({"origins":{"a.example":{"ip":"999.1.1.1"}}})"),
                    std::runtime_error);
    // status out of range
    CHECK_THROWS_AS(parse_scenario_text(R"({"origins":{"a.example":{"status":42}}})"),
                    std::runtime_error);
    // 3xx without a redirect target
    CHECK_THROWS_AS(parse_scenario_text(R"({"origins":{"a.example":{"status":302}}})"),
                    std::runtime_error);
    // inject rule without an ip
    CHECK_THROWS_AS(
        parse_scenario_text(R"({"dns_rules":{"a.example":{"action":"inject"}}})"),
        std::runtime_error);
    // unknown action
    CHECK_THROWS_AS(
        parse_scenario_text(R"({"dns_rules":{"a.example":{"action":"fry"}}})"),
        std::runtime_error);
    // http rule pointing at a domain the web doesn't serve
    CHECK_THROWS_AS(
        parse_scenario_text(R"({"http_rules":{"ghost.example":{"action":"rst"}}})"),
        std::runtime_error);
    // tcp rule for a non-origin
    CHECK_THROWS_AS(
        parse_scenario_text(R"({"tcp_rules":{"ghost.example":{"action":"drop"}}})"),
        std::runtime_error);
    // invalid domain key
    CHECK_THROWS_AS(parse_scenario_text(R"({"origins":{"-bad-":{}}})"), std::runtime_error);
}

TEST_CASE("stable_hash is deterministic and input-sensitive") {
    CHECK(stable_hash("abc") == stable_hash("abc"));
    CHECK(stable_hash("abc") != stable_hash("abd"));
    CHECK(stable_hash(7, "a.example", "v1") == stable_hash(7, "a.example", "v1"));
    CHECK(stable_hash(7, "a.example", "v1") != stable_hash(7, "a.example", "v2"));
    CHECK(stable_hash(7, "a.example", "v1") != stable_hash(8, "a.example", "v1"));
}

TEST_CASE("generate_origin_body is deterministic html") {
    auto b1 = generate_origin_body("site.example", 99);
    auto b2 = generate_origin_body("site.example", 99);
    CHECK(b1 == b2);
    CHECK(generate_origin_body("site.example", 100) != b1);
    CHECK(generate_origin_body("other.example", 99) != b1);
    auto tf = html_tag_tf(b1);
    CHECK(tf.count("html") == 1);
    CHECK(tf.count("p") == 1);
}

TEST_CASE("origin render_response per-vantage jitter is whitespace only") {
    auto sc = parse_scenario_text(R"({"seed": 5, "origins": {"a.example": {}}})");
    OriginServer v1({"v1", &sc, nullptr, 3});
    OriginServer v2({"v2", &sc, nullptr, 3});

    auto r1 = parse_http_response(v1.render_response("a.example"));
    auto r2 = parse_http_response(v2.render_response("a.example"));
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());
    CHECK(r1->status_code == 200);
    // bodies differ at most in trailing spaces
    auto strip = [](std::string s) {
        while (!s.empty() && s.back() == ' ') s.pop_back();
        return s;
    };
    CHECK(strip(r1->body) == strip(r2->body));
    CHECK(html_tag_tf(r1->body) == html_tag_tf(r2->body));
    size_t d = r1->body.size() > r2->body.size() ? r1->body.size() - r2->body.size()
                                                 : r2->body.size() - r1->body.size();
    CHECK(d <= 3);
    // same vantage renders byte-identically
    CHECK(v1.render_response("a.example") == v1.render_response("a.example"));
}

TEST_CASE("origin render_response status variants") {
    auto sc = parse_scenario_text(R"({
        "seed": 5,
        "origins": {
            "redir.example": {"status": 301, "redirect": "https://new.example/"},
            "gone.example": {"status": 404}
        }
    })");
    OriginServer origin({"v1", &sc, nullptr, 0});

    auto redir = parse_http_response(origin.render_response("redir.example"));
    REQUIRE(redir.has_value());
    CHECK(redir->status_code == 301);
    CHECK(redir->header("location") == std::string("https://new.example/"));

    auto gone = parse_http_response(origin.render_response("gone.example"));
    REQUIRE(gone.has_value());
    CHECK(gone->status_code == 404);

    auto unknown = parse_http_response(origin.render_response("nowhere.example"));
    REQUIRE(unknown.has_value());
    CHECK(unknown->status_code == 404);
}

TEST_CASE("dns sim serves the zone and applies censor rules") {
    auto sc = parse_scenario_text(R"({
        "origins": {"ok.example": {}, "victim.example": {}, "slow.example": {}},
        "dns_rules": {
            "victim.example": {"action": "inject", "ip": "99.83.178.7"},
            "bogus.example": {"action": "bogon", "ip": "10.10.34.36"},
            "gone.example": {"action": "nxdomain"},
            "fail.example": {"action": "servfail"},
            "deny.example": {"action": "refused"}
        }
    })");
    std::map<std::string, Ipv4> zone{{"ok.example", ip("11.0.0.1")},
                                     {"victim.example", ip("11.0.0.2")},
                                     {"slow.example", ip("11.0.0.3")},
                                     {"gone.example", ip("11.0.0.4")},
                                     {"fail.example", ip("11.0.0.5")},
                                     {"deny.example", ip("11.0.0.6")},
                                     {"bogus.example", ip("11.0.0.7")}};

    DnsSimServer clean({"c1", false, 60, &sc, zone, nullptr});
    DnsSimServer censor({"test", true, 60, &sc, zone, nullptr});
    REQUIRE(clean.start());
    REQUIRE(censor.start());

    // clean resolver ignores the rules
    auto honest = resolve_on(clean, "c1", "victim.example");
    REQUIRE(honest.has_answers());
    CHECK(honest.ips == std::vector<Ipv4>{ip("11.0.0.2")});
    CHECK(honest.min_ttl == 60u);

    // censoring resolver applies each action
    auto injected = resolve_on(censor, "test", "victim.example");
    REQUIRE(injected.has_answers());
    CHECK(injected.ips == std::vector<Ipv4>{ip("99.83.178.7")});

    auto bogon = resolve_on(censor, "test", "bogus.example");
    REQUIRE(bogon.has_answers());
    CHECK(bogon.ips == std::vector<Ipv4>{ip("10.10.34.36")});

    auto gone = resolve_on(censor, "test", "gone.example");
    CHECK(gone.kind == OutcomeKind::error);
    CHECK(gone.error_code == RCode::nxdomain);

    auto fail = resolve_on(censor, "test", "fail.example");
    CHECK(fail.error_code == RCode::servfail);

    auto deny = resolve_on(censor, "test", "deny.example");
    CHECK(deny.error_code == RCode::refused);

    // unlisted name on the censor behaves normally
    auto pass = resolve_on(censor, "test", "ok.example");
    REQUIRE(pass.has_answers());
    CHECK(pass.ips == std::vector<Ipv4>{ip("11.0.0.1")});

    // a name outside the zone is NXDOMAIN everywhere
    auto ghost = resolve_on(clean, "c1", "ghost.example");
    CHECK(ghost.kind == OutcomeKind::error);
    CHECK(ghost.error_code == RCode::nxdomain);

    clean.stop();
    censor.stop();
}

TEST_CASE("control cache honors ttl and skips errors") {
    ControlCache cache(std::chrono::seconds(300));
    auto d = *Domain::parse("cached.example");
    CHECK(!cache.get("c1", d).has_value());
    cache.put("c1", d, DnsOutcome::answers({ip("11.2.3.4")}, 60), std::chrono::seconds(60));
    auto hit = cache.get("c1", d);
    REQUIRE(hit.has_value());
    CHECK(hit->ips == std::vector<Ipv4>{ip("11.2.3.4")});
    CHECK(!cache.get("c2", d).has_value());  // per-channel keying

    auto d2 = *Domain::parse("flash.example");
    cache.put("c1", d2, DnsOutcome::answers({ip("11.2.3.5")}, 0), std::chrono::seconds(0));
    CHECK(!cache.get("c1", d2).has_value());  // zero ttl never produces a hit

    auto d3 = *Domain::parse("broken.example");
    cache.put("c1", d3, DnsOutcome::error(RCode::servfail), std::chrono::seconds(60));
    CHECK(!cache.get("c1", d3).has_value());  // errors are never cached
}

TEST_CASE("sim network wires a full environment") {
    auto sc = parse_scenario_text(R"({
        "seed": 3,
        "origins": {
            "pinned.example": {"ip": "11.9.9.9"},
            "auto1.example": {},
            "auto2.example": {}
        }
    })");
    SimNetwork net(sc, {.control_resolvers = 3, .control_vantages = 2});
    REQUIRE(net.start());

    CHECK(net.reflector_ip() == ip("12.0.0.1"));
    CHECK(net.origin_ips().at("pinned.example") == ip("11.9.9.9"));
    // auto addresses come from 11.0.0.0/8 and never collide
    std::set<Ipv4> seen;
    for (const auto& [name, addr] : net.origin_ips()) seen.insert(addr);
    CHECK(seen.size() == 3);
    CHECK(net.origin_ips().at("auto1.example") == ip("11.0.0.1"));
    CHECK(net.origin_ips().at("auto2.example") == ip("11.0.0.2"));

    CHECK(net.test_channel().id == "test");
    CHECK(net.control_channels().size() == 3);
    CHECK(net.control_channels()[0].id == "c1");
    CHECK(net.control_channels()[0].is_control);
    CHECK(net.test_vantage().kind == net::VantageSpec::Kind::relay);
    CHECK(net.control_vantages().size() == 2);

    // end to end: resolve through the test channel, fetch through the vantage
    auto out = resolve_via_channel(net.test_channel(), *Domain::parse("auto1.example"),
                                   std::chrono::milliseconds(2'000));
    REQUIRE(out.has_answers());
    CHECK(out.ips == std::vector<Ipv4>{ip("11.0.0.1")});

    net::Vantage vantage(net.test_vantage());
    auto resp = http_get(vantage, ip("11.0.0.1"), 80, "auto1.example");
    CHECK(resp.status == FetchStatus::ok);
    CHECK(resp.status_code == 200);
    CHECK(!resp.body.empty());

    net.stop();
}

TEST_CASE("sim network rejects duplicate pinned addresses") {
    auto sc = parse_scenario_text(R"({
        "origins": {
            "a.example": {"ip": "11.5.5.5"},
            "b.example": {"ip": "11.5.5.5"}
        }
    })");
    CHECK_THROWS_AS(SimNetwork(sc, {}), std::runtime_error);
}

TEST_CASE("transcript sequencing is monotonic and filterable") {
    Transcript t;
    CHECK(t.record("a", "x", "1") == 0);
    CHECK(t.record("b", "y", "2") == 1);
    CHECK(t.record("a", "x", "3") == 2);
    auto all = t.snapshot();
    REQUIRE(all.size() == 3);
    for (size_t i = 1; i < all.size(); ++i) CHECK(all[i].seq > all[i - 1].seq);
    CHECK(t.count("x") == 2);
    auto only_a = t.filter([](const Event& e) { return e.actor == "a"; });
    CHECK(only_a.size() == 2);
    t.clear();
    CHECK(t.snapshot().empty());
}
