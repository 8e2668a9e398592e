#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "cenprobe/dns_engine.hpp"
#include "cenprobe/stats.hpp"

using namespace cenprobe;

namespace {

Ipv4 ip(const char* s) { return Ipv4::parse(s).value(); }

DomainDnsData make_data(const char* name, DnsOutcome test,
                        std::vector<std::pair<std::string, DnsOutcome>> controls) {
    DomainDnsData d;
    d.domain = *Domain::parse(name);
    d.test = std::move(test);
    for (auto& [id, o] : controls) d.controls.emplace(id, std::move(o));
    return d;
}

}  // namespace

TEST_CASE("cidr parsing and membership") {
    auto r = parse_cidr("192.168.0.0/16");
    REQUIRE(r.has_value());
    CHECK(r->contains(ip("192.168.1.1")));
    CHECK(!r->contains(ip("192.169.0.1")));
    CHECK(!parse_cidr("192.168.0.0/33").has_value());
    CHECK(!parse_cidr("not-an-ip/8").has_value());
    auto all = parse_cidr("0.0.0.0/0");
    REQUIRE(all.has_value());
    CHECK(all->contains(ip("8.8.8.8")));
}

TEST_CASE("builtin bogons") {
    auto bogons = BogonList::builtin();
    CHECK(is_bogon(ip("192.168.1.1"), bogons));
    CHECK(is_bogon(ip("10.10.34.36"), bogons));
    CHECK(is_bogon(ip("100.64.0.1"), bogons));   // RFC 6598 shared space
    CHECK(is_bogon(ip("127.0.0.1"), bogons));
    CHECK(is_bogon(ip("198.18.0.1"), bogons));
    CHECK(!is_bogon(ip("8.8.8.8"), bogons));
    CHECK(!is_bogon(ip("93.184.216.34"), bogons));
    // simulator's virtual address space must look like public unicast
    CHECK(!is_bogon(ip("11.0.0.1"), bogons));
    CHECK(!is_bogon(ip("12.0.0.1"), bogons));
}

TEST_CASE("classify_direct: subset of control union is uncensored") {
    auto d = make_data("a.example", DnsOutcome::answers({ip("1.2.3.4")}),
                       {{"c1", DnsOutcome::answers({ip("1.2.3.4"), ip("1.2.3.5")})},
                        {"c2", DnsOutcome::answers({ip("1.2.3.5")})}});
    CHECK(classify_direct(d, BogonList::builtin()) == DirectClass::uncensored);
}

TEST_CASE("classify_direct: nxdomain with answering control is censored error") {
    auto d = make_data("b.example", DnsOutcome::error(RCode::nxdomain),
                       {{"c1", DnsOutcome::answers({ip("1.2.3.4")})},
                        {"c2", DnsOutcome::error(RCode::nxdomain)}});
    CHECK(classify_direct(d, BogonList::builtin()) == DirectClass::censored_error);
}

TEST_CASE("classify_direct: bogon answer is censored regardless of controls") {
    auto d = make_data("c.example", DnsOutcome::answers({ip("10.0.0.1")}),
                       {{"c1", DnsOutcome::answers({ip("1.2.3.4")})},
                        {"c2", DnsOutcome::answers({ip("1.2.3.4")})}});
    CHECK(classify_direct(d, BogonList::builtin()) == DirectClass::censored_bogon);
}

TEST_CASE("classify_direct: public non-control answer is a mismatch") {
    auto d = make_data("d.example", DnsOutcome::answers({ip("8.8.8.8")}),
                       {{"c1", DnsOutcome::answers({ip("1.2.3.4")})},
                        {"c2", DnsOutcome::answers({ip("1.2.3.4")})}});
    CHECK(classify_direct(d, BogonList::builtin()) == DirectClass::mismatch);
}

TEST_CASE("classify_direct: test timeout is untestable") {
    auto d = make_data("e.example", DnsOutcome::timeout(),
                       {{"c1", DnsOutcome::answers({ip("1.2.3.4")})}});
    CHECK(classify_direct(d, BogonList::builtin()) == DirectClass::untestable);
}

TEST_CASE("classify_direct: no control answers is untestable") {
    auto d = make_data("f.example", DnsOutcome::answers({ip("8.8.8.8")}),
                       {{"c1", DnsOutcome::error(RCode::servfail)},
                        {"c2", DnsOutcome::timeout()}});
    CHECK(classify_direct(d, BogonList::builtin()) == DirectClass::untestable);
}

TEST_CASE("control_ip_union collects every control answer") {
    auto d = make_data("g.example", DnsOutcome::answers({ip("9.9.9.9")}),
                       {{"c1", DnsOutcome::answers({ip("1.1.1.1"), ip("2.2.2.2")})},
                        {"c2", DnsOutcome::answers({ip("2.2.2.2"), ip("3.3.3.3")})},
                        {"c3", DnsOutcome::error(RCode::refused)}});
    auto u = control_ip_union(d);
    CHECK(u == std::set<Ipv4>{ip("1.1.1.1"), ip("2.2.2.2"), ip("3.3.3.3")});
}

TEST_CASE("compute_mrf basic frequencies") {
    auto a = ip("1.1.1.1");
    auto b = ip("2.2.2.2");
    SUBCASE("A A B -> (A, 2/3)") {
        auto s = compute_mrf("ch", {DnsOutcome::answers({a}), DnsOutcome::answers({a}),
                                    DnsOutcome::answers({b})});
        CHECK(s.most_frequent_ip == a);
        CHECK(s.mrf == doctest::Approx(2.0 / 3.0));
        CHECK(s.sample_size == 3);
    }
    SUBCASE("singleton -> 1.0") {
        auto s = compute_mrf("ch", {DnsOutcome::answers({b})});
        CHECK(s.most_frequent_ip == b);
        CHECK(s.mrf == 1.0);
    }
    SUBCASE("tie breaks to lexicographically smallest dotted quad") {
        auto s = compute_mrf("ch", {DnsOutcome::answers({b}), DnsOutcome::answers({a})});
        CHECK(s.most_frequent_ip == a);
        CHECK(s.mrf == 0.5);
        // string order, not numeric order: "100.0.0.1" < "99.0.0.1"
        auto s2 = compute_mrf("ch", {DnsOutcome::answers({ip("99.0.0.1")}),
                                     DnsOutcome::answers({ip("100.0.0.1")})});
        CHECK(s2.most_frequent_ip == ip("100.0.0.1"));
    }
}

TEST_CASE("compute_mrf ignores non-answer outcomes and uses first-listed ip") {
    auto s = compute_mrf("ch", {DnsOutcome::answers({ip("5.5.5.5"), ip("6.6.6.6")}),
                                DnsOutcome::error(RCode::nxdomain), DnsOutcome::timeout(),
                                DnsOutcome::answers({ip("5.5.5.5")})});
    CHECK(s.most_frequent_ip == ip("5.5.5.5"));
    CHECK(s.mrf == 1.0);  // 2 of 2 answer observations
    CHECK(s.sample_size == 2);
}

TEST_CASE("compute_mrf empty sample throws") {
    CHECK_THROWS_WITH_AS(compute_mrf("ch", {}), "empty sample", std::invalid_argument);
    CHECK_THROWS_AS(compute_mrf("ch", {DnsOutcome::timeout()}), std::invalid_argument);
}

TEST_CASE("compute_mrf matches brute force on random samples") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> pool(0, 9);
    std::uniform_int_distribution<int> len(1, 60);
    for (int round = 0; round < 100; ++round) {
        std::vector<DnsOutcome> outcomes;
        std::map<std::string, size_t> freq;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            auto a = ip(("198.51.100." + std::to_string(pool(rng))).c_str());
            outcomes.push_back(DnsOutcome::answers({a}));
            ++freq[a.to_string()];
        }
        size_t best = 0;
        std::string best_ip;
        for (const auto& [s, c] : freq) {
            if (c > best || (c == best && s < best_ip)) {
                best = c;
                best_ip = s;
            }
        }
        auto got = compute_mrf("ch", outcomes);
        CHECK(got.most_frequent_ip.to_string() == best_ip);
        CHECK(got.mrf == doctest::Approx(double(best) / double(n)));
    }
}

TEST_CASE("detect_tampering threshold arithmetic") {
    MrfStat test{"test", ip("44.44.44.44"), 0.30, 100};
    std::vector<MrfStat> controls;
    for (double v : {0.05, 0.06, 0.05, 0.04, 0.05})
        controls.push_back({"c", ip("1.1.1.1"), v, 100});

    auto d = detect_tampering(test, controls);
    CHECK(d.tampering);  // 0.25 > 3 * 0.00632...
    CHECK(d.control_mean == doctest::Approx(0.05));
    CHECK(d.control_stddev == doctest::Approx(0.0063245553).epsilon(1e-6));
    CHECK(d.threshold == doctest::Approx(0.05 + 3 * 0.0063245553).epsilon(1e-6));
}

TEST_CASE("detect_tampering: equal to control mean is not tampering") {
    MrfStat test{"test", ip("44.44.44.44"), 0.05, 100};
    std::vector<MrfStat> controls{{"c1", ip("1.1.1.1"), 0.05, 100},
                                  {"c2", ip("1.1.1.1"), 0.05, 100}};
    CHECK(!detect_tampering(test, controls).tampering);
}

TEST_CASE("detect_tampering: sigma floor keeps zero-variance controls sane") {
    // controls all 0.05 -> sigma 0, floor 0.01 -> threshold 0.05 + 0.03
    MrfStat test{"test", ip("44.44.44.44"), 0.06, 100};
    std::vector<MrfStat> controls{{"c1", ip("1.1.1.1"), 0.05, 100},
                                  {"c2", ip("1.1.1.1"), 0.05, 100},
                                  {"c3", ip("1.1.1.1"), 0.05, 100}};
    CHECK(!detect_tampering(test, controls).tampering);  // 0.01 < 0.03
    test.mrf = 0.09;
    CHECK(detect_tampering(test, controls).tampering);  // 0.04 > 0.03
}

TEST_CASE("detect_tampering requires two controls") {
    MrfStat test{"test", ip("44.44.44.44"), 0.9, 100};
    CHECK_THROWS_WITH_AS(detect_tampering(test, {}), "insufficient controls",
                         std::invalid_argument);
    CHECK_THROWS_AS(detect_tampering(test, {{"c1", ip("1.1.1.1"), 0.05, 100}}),
                    std::invalid_argument);
}

TEST_CASE("detect_tampering monotone in test mrf") {
    std::vector<MrfStat> controls{{"c1", ip("1.1.1.1"), 0.10, 50},
                                  {"c2", ip("1.1.1.1"), 0.12, 50},
                                  {"c3", ip("1.1.1.1"), 0.08, 50}};
    bool prev = false;
    for (double m = 0.0; m <= 1.0; m += 0.01) {
        bool now = detect_tampering({"t", ip("4.4.4.4"), m, 50}, controls).tampering;
        if (prev) CHECK(now);  // once true, stays true as mrf grows
        prev = now;
    }
    CHECK(prev);
}

namespace {

// Synthesizes a run: `poisoned` domains answer modal_ip at the test channel,
// the rest answer per-domain unique addresses everywhere.
std::vector<DomainDnsData> synth_run(size_t n, size_t poisoned, const Ipv4& modal_ip) {
    std::vector<DomainDnsData> data;
    for (size_t i = 0; i < n; ++i) {
        std::string name = "d" + std::to_string(i) + ".example";
        auto honest = ip(("93.184." + std::to_string(i / 250) + "." + std::to_string(i % 250 + 1))
                             .c_str());
        DnsOutcome test = i < poisoned ? DnsOutcome::answers({modal_ip})
                                       : DnsOutcome::answers({ip("99.99.99.99")});
        data.push_back(make_data(name.c_str(), std::move(test),
                                 {{"c1", DnsOutcome::answers({honest})},
                                  {"c2", DnsOutcome::answers({honest})}}));
    }
    return data;
}

}  // namespace

TEST_CASE("analyze_dns flags exactly the poisoned domains") {
    auto modal = ip("203.0.113.77");
    // 60 poisoned to modal, 40 diverted to a second consistent address;
    // every domain is a mismatch, so |D'| = 100.
    auto data = synth_run(100, 60, modal);
    auto result = analyze_dns(data, BogonList::builtin());
    REQUIRE(result.verdicts.size() == 100);
    CHECK(result.mrf.dprime_size == 100);
    CHECK(result.mrf.evaluated);
    CHECK(result.mrf.tampering);
    REQUIRE(result.mrf.test_stat.has_value());
    CHECK(result.mrf.test_stat->most_frequent_ip == modal);
    CHECK(result.mrf.test_stat->mrf == doctest::Approx(0.6));

    size_t censored = 0;
    for (size_t i = 0; i < result.verdicts.size(); ++i) {
        const auto& v = result.verdicts[i];
        if (v.verdict == Verdict::censored) {
            ++censored;
            CHECK(v.evidence == "dns_tampering");
            CHECK(i < 60);
        }
    }
    CHECK(censored == 60);
}

TEST_CASE("analyze_dns below min_dprime leaves mismatches unconfirmed") {
    auto data = synth_run(10, 6, ip("203.0.113.77"));
    auto result = analyze_dns(data, BogonList::builtin());
    CHECK(result.mrf.dprime_size == 10);
    CHECK(!result.mrf.evaluated);
    CHECK(result.mrf.gate_reason == "dprime_below_minimum");
    for (const auto& v : result.verdicts) {
        CHECK(v.verdict == Verdict::uncensored);
        CHECK(v.note == "unconfirmed_mismatch");
    }
}

TEST_CASE("analyze_dns gate reason when nothing mismatches") {
    std::vector<DomainDnsData> data;
    auto a = ip("93.184.216.34");
    data.push_back(make_data("ok.example", DnsOutcome::answers({a}),
                             {{"c1", DnsOutcome::answers({a})},
                              {"c2", DnsOutcome::answers({a})}}));
    auto result = analyze_dns(data, BogonList::builtin());
    CHECK(result.mrf.dprime_size == 0);
    CHECK(!result.mrf.evaluated);
    CHECK(result.mrf.gate_reason == "dprime_below_minimum");
    REQUIRE(result.verdicts.size() == 1);
    CHECK(result.verdicts[0].verdict == Verdict::uncensored);
}

TEST_CASE("analyze_dns gates when only one control channel answered") {
    std::vector<DomainDnsData> data;
    for (size_t i = 0; i < 30; ++i) {
        std::string name = "x" + std::to_string(i) + ".example";
        data.push_back(make_data(name.c_str(), DnsOutcome::answers({ip("8.8.8.8")}),
                                 {{"c1", DnsOutcome::answers({ip("1.2.3.4")})}}));
    }
    auto result = analyze_dns(data, BogonList::builtin());
    CHECK(result.mrf.dprime_size == 30);
    CHECK(!result.mrf.evaluated);
    CHECK(result.mrf.gate_reason == "insufficient_controls");
    for (const auto& v : result.verdicts) {
        CHECK(v.verdict == Verdict::uncensored);
        CHECK(v.note == "unconfirmed_mismatch");
    }
}

TEST_CASE("analyze_dns verdict partition covers every domain") {
    std::vector<DomainDnsData> data;
    auto pub = ip("93.184.216.34");
    data.push_back(make_data("sub.example", DnsOutcome::answers({pub}),
                             {{"c1", DnsOutcome::answers({pub})},
                              {"c2", DnsOutcome::answers({pub})}}));
    data.push_back(make_data("err.example", DnsOutcome::error(RCode::refused),
                             {{"c1", DnsOutcome::answers({pub})},
                              {"c2", DnsOutcome::answers({pub})}}));
    data.push_back(make_data("bog.example", DnsOutcome::answers({ip("192.168.5.5")}),
                             {{"c1", DnsOutcome::answers({pub})},
                              {"c2", DnsOutcome::answers({pub})}}));
    data.push_back(make_data("off.example", DnsOutcome::timeout(),
                             {{"c1", DnsOutcome::answers({pub})},
                              {"c2", DnsOutcome::answers({pub})}}));
    auto result = analyze_dns(data, BogonList::builtin());
    REQUIRE(result.verdicts.size() == 4);
    CHECK(result.verdicts[0].verdict == Verdict::uncensored);
    CHECK(result.verdicts[1].verdict == Verdict::censored);
    CHECK(result.verdicts[1].evidence == "dns_error");
    CHECK(result.verdicts[2].verdict == Verdict::censored);
    CHECK(result.verdicts[2].evidence == "dns_bogon");
    CHECK(result.verdicts[3].verdict == Verdict::untestable);
    for (const auto& v : result.verdicts) CHECK(v.technique == technique::kDns);
}
