#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "cenprobe/jsonl.hpp"
#include "cenprobe/report.hpp"

using namespace cenprobe;

namespace {

Ipv4 ip(const char* s) { return Ipv4::parse(s).value(); }

}  // namespace

TEST_CASE("dns record round trip") {
    jsonl::DnsLineRecord rec;
    rec.domain = "a.example";
    rec.channel = "c1";
    rec.is_control = true;
    rec.outcome = DnsOutcome::answers({ip("1.2.3.4"), ip("5.6.7.8")}, 300);

    auto line = jsonl::to_line(rec);
    CHECK(line.find('\n') == std::string::npos);
    auto back = jsonl::dns_from_line(line);
    REQUIRE(back.has_value());
    CHECK(back->domain == "a.example");
    CHECK(back->channel == "c1");
    CHECK(back->is_control);
    CHECK(back->outcome.kind == OutcomeKind::answers);
    CHECK(back->outcome.ips == rec.outcome.ips);
    CHECK(back->outcome.min_ttl == 300u);

    SUBCASE("error outcome keeps its rcode") {
        rec.outcome = DnsOutcome::error(RCode::nxdomain);
        auto back2 = jsonl::dns_from_line(jsonl::to_line(rec));
        REQUIRE(back2.has_value());
        CHECK(back2->outcome.kind == OutcomeKind::error);
        CHECK(back2->outcome.error_code == RCode::nxdomain);
    }
    SUBCASE("timeout outcome") {
        rec.outcome = DnsOutcome::timeout();
        auto back2 = jsonl::dns_from_line(jsonl::to_line(rec));
        REQUIRE(back2.has_value());
        CHECK(back2->outcome.kind == OutcomeKind::timeout);
    }
}

TEST_CASE("http record round trip") {
    HttpFetchRecord rec;
    rec.domain = *Domain::parse("b.example");
    rec.vantage = "v1";
    rec.is_control = false;
    rec.fetch_status = FetchStatus::ok;
    rec.status_code = 301;
    rec.header_keys = {"server", "location"};
    rec.redirect_location = "https://next.example/";
    rec.body_length = 512;
    rec.tag_tf = {{"html", 1}, {"p", 3}};
    rec.matched_signature = "ispA";

    auto back = jsonl::http_from_line(jsonl::to_line(rec));
    REQUIRE(back.has_value());
    CHECK(back->domain.name() == "b.example");
    CHECK(back->vantage == "v1");
    CHECK(back->fetch_status == FetchStatus::ok);
    CHECK(back->status_code == 301);
    CHECK(back->header_keys == rec.header_keys);
    CHECK(back->redirect_location == rec.redirect_location);
    CHECK(back->body_length == 512);
    CHECK(back->tag_tf == rec.tag_tf);
    CHECK(back->matched_signature == "ispA");

    SUBCASE("failed fetch carries no response fields") {
        rec.fetch_status = FetchStatus::reset;
        auto line = jsonl::to_line(rec);
        CHECK(line.find("status_code") == std::string::npos);
        auto back2 = jsonl::http_from_line(line);
        REQUIRE(back2.has_value());
        CHECK(back2->fetch_status == FetchStatus::reset);
        CHECK(back2->status_code == 0);
    }
}

TEST_CASE("tcp record round trip") {
    TcpProbeRecord rec;
    rec.domain = *Domain::parse("c.example");
    rec.ip = ip("11.0.0.3");
    rec.port = 443;
    rec.ping_ran = true;
    rec.ping = net::PingStatus::ok;
    rec.test_attempts = {net::ConnectStatus::refused, net::ConnectStatus::timeout};
    rec.control_attempts = {net::ConnectStatus::ok};
    finish_tcp_record(rec);

    auto back = jsonl::tcp_from_line(jsonl::to_line(rec));
    REQUIRE(back.has_value());
    CHECK(back->domain.name() == "c.example");
    CHECK(back->ip == rec.ip);
    CHECK(back->port == 443);
    CHECK(back->ping_ran);
    CHECK(back->ping == net::PingStatus::ok);
    CHECK(back->test_attempts == rec.test_attempts);
    CHECK(back->control_attempts == rec.control_attempts);
    CHECK(back->verdict == rec.verdict);
    CHECK(back->evidence == rec.evidence);
}

TEST_CASE("sni record round trip") {
    SniProbeRecord rec;
    rec.domain = *Domain::parse("d.example");
    rec.reflector_ip = ip("12.0.0.1");
    rec.test_attempts = {{net::ConnectStatus::ok, tls::HsStatus::reset}};
    rec.control_attempts = {{net::ConnectStatus::ok, tls::HsStatus::ok}};
    finish_sni_record(rec);

    auto back = jsonl::sni_from_line(jsonl::to_line(rec));
    REQUIRE(back.has_value());
    CHECK(back->domain.name() == "d.example");
    CHECK(back->reflector_ip == rec.reflector_ip);
    REQUIRE(back->test_attempts.size() == 1);
    CHECK(back->test_attempts[0].connect == net::ConnectStatus::ok);
    CHECK(back->test_attempts[0].handshake == tls::HsStatus::reset);
    CHECK(back->verdict == Verdict::censored);
    CHECK(back->evidence == "sni_handshake");
}

TEST_CASE("verdict record round trip") {
    ProbeVerdict v;
    v.domain = "e.example";
    v.technique = technique::kDns;
    v.verdict = Verdict::censored;
    v.evidence = "dns_bogon";
    v.note = "rcode=NXDOMAIN";
    v.matched_signature = "ispA";
    v.ip = "10.10.34.36";

    auto back = jsonl::verdict_from_line(jsonl::to_line(v));
    REQUIRE(back.has_value());
    CHECK(back->domain == v.domain);
    CHECK(back->technique == v.technique);
    CHECK(back->verdict == v.verdict);
    CHECK(back->evidence == v.evidence);
    CHECK(back->note == v.note);
    CHECK(back->matched_signature == v.matched_signature);
    CHECK(back->ip == v.ip);
}

TEST_CASE("parsers reject wrong types and junk") {
    jsonl::DnsLineRecord rec;
    rec.domain = "a.example";
    rec.channel = "test";
    rec.outcome = DnsOutcome::timeout();
    auto dns_line = jsonl::to_line(rec);

    CHECK(!jsonl::http_from_line(dns_line).has_value());
    CHECK(!jsonl::tcp_from_line(dns_line).has_value());
    CHECK(!jsonl::dns_from_line("not json").has_value());
    CHECK(!jsonl::dns_from_line("{}").has_value());
    CHECK(!jsonl::dns_from_line("[1,2,3]").has_value());
    CHECK(jsonl::dns_from_line(dns_line).has_value());
}

TEST_CASE("read_lines skips blanks and throws on missing files") {
    std::string path = "lines_test.jsonl";
    {
        std::ofstream out(path);
        out << "one\n\ntwo\n   \nthree\n";
    }
    auto lines = jsonl::read_lines(path);
    std::remove(path.c_str());
    CHECK(lines == std::vector<std::string>{"one", "two", "three"});
    CHECK_THROWS_AS(jsonl::read_lines("no/such/dir/x.jsonl"), std::runtime_error);
}

namespace {

RunReport tiny_report() {
    RunReport rep;
    rep.isp = "testnet";
    ProbeVerdict v1;
    v1.domain = "a.example";
    v1.technique = technique::kDns;
    v1.verdict = Verdict::censored;
    v1.evidence = "dns_error";
    ProbeVerdict v2;
    v2.domain = "a.example";
    v2.technique = technique::kHttp;
    v2.verdict = Verdict::censored;
    v2.evidence = "http_reset";
    ProbeVerdict v3;
    v3.domain = "b.example";
    v3.technique = technique::kHttp;
    v3.verdict = Verdict::uncensored;
    rep.verdicts = {v1, v2, v3};
    return rep;
}

}  // namespace

TEST_CASE("finalize_report derives venn, overlap, and blocklist") {
    auto rep = tiny_report();
    finalize_report(rep);
    CHECK(rep.venn == std::map<std::string, std::size_t>{{"both", 1}});
    REQUIRE(rep.blocklist.has_value());
    CHECK(rep.blocklist->domains == std::set<std::string>{"a.example"});
    REQUIRE(rep.technique_overlap.has_value());
    CHECK(rep.technique_overlap->names == std::vector<std::string>{"dns", "http"});
    CHECK(rep.technique_overlap->jaccard[0][1] == 1.0);
}

TEST_CASE("json report has the versioned skeleton and stable order") {
    auto rep = tiny_report();
    finalize_report(rep);
    auto text = emit_report(rep, ReportFormat::json);
    CHECK(text.back() == '\n');

    auto j = nlohmann::json::parse(text);
    CHECK(j.at("schema_version").get<int>() >= 1);
    CHECK(j.at("tool").at("name") == "cenprobe");
    CHECK(j.at("isp") == "testnet");
    REQUIRE(j.at("summary").is_array());
    CHECK(j.at("summary").size() == 4);  // dns, tcp, http, sni always present
    CHECK(j.at("verdicts").size() == 3);
    CHECK(j.at("venn").at("both") == 1);
    CHECK(j.at("blocklist").at("domains").size() == 1);

    // summary row for dns counts the censored domain
    bool found_dns = false;
    for (const auto& row : j.at("summary")) {
        if (row.at("technique") == "dns") {
            found_dns = true;
            CHECK(row.at("censored_count") == 1);
            CHECK(row.at("untestable_count") == 0);
        }
    }
    CHECK(found_dns);
}

TEST_CASE("empty run still renders a valid report") {
    RunReport rep;
    rep.isp = "empty";
    finalize_report(rep);
    auto text = emit_report(rep, ReportFormat::json);
    auto j = nlohmann::json::parse(text);
    CHECK(j.at("verdicts").empty());
    CHECK(j.at("summary").size() == 4);
    auto csv = emit_report(rep, ReportFormat::csv);
    CHECK(csv.find("isp,technique,censored_count,untestable_count") == 0);
}

TEST_CASE("report rendering is deterministic") {
    auto rep = tiny_report();
    finalize_report(rep);
    CHECK(emit_report(rep, ReportFormat::json) == emit_report(rep, ReportFormat::json));
    CHECK(emit_report(rep, ReportFormat::csv) == emit_report(rep, ReportFormat::csv));
}

TEST_CASE("csv emitters quote and count consistently") {
    auto rep = tiny_report();
    rep.verdicts[0].note = "weird, \"note\"";
    finalize_report(rep);

    auto vcsv = verdicts_csv(rep.verdicts);
    // header + 3 rows
    CHECK(std::count(vcsv.begin(), vcsv.end(), '\n') == 4);
    CHECK(vcsv.find("\"weird, \"\"note\"\"\"") != std::string::npos);

    auto scsv = summary_csv(rep);
    CHECK(std::count(scsv.begin(), scsv.end(), '\n') == 5);  // header + 4 techniques

    std::vector<IpFrequencyRow> rows{{ip("99.83.178.7"), 3, 0.75}, {ip("1.2.3.4"), 1, 0.25}};
    auto fcsv = frequency_csv(rows);
    CHECK(fcsv.find("ip,count,fraction") == 0);
    CHECK(fcsv.find("99.83.178.7,3,0.75") != std::string::npos);
}

TEST_CASE("report_format_from_string") {
    CHECK(report_format_from_string("json") == ReportFormat::json);
    CHECK(report_format_from_string("csv") == ReportFormat::csv);
    CHECK_THROWS_AS(report_format_from_string("yaml"), std::invalid_argument);
}
