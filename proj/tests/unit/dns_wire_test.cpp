#include <doctest.h>

#include "cenprobe/dns_wire.hpp"

using namespace cenprobe;
using namespace cenprobe::dns::wire;

TEST_CASE("encode_query wire layout") {
    std::string q = encode_query(0x1234, "ab.cd");
    REQUIRE(q.size() == 12 + 1 + 2 + 1 + 2 + 1 + 4);
    CHECK(static_cast<unsigned char>(q[0]) == 0x12);
    CHECK(static_cast<unsigned char>(q[1]) == 0x34);
    CHECK((static_cast<unsigned char>(q[2]) & 0x01) == 0x01);  // RD
    // qdcount = 1
    CHECK(static_cast<unsigned char>(q[4]) == 0);
    CHECK(static_cast<unsigned char>(q[5]) == 1);
    // name: \2ab\2cd\0
    CHECK(q.substr(12, 7) == std::string("\x02"
                                         "ab"
                                         "\x02"
                                         "cd",
                                         6) +
                                 std::string(1, '\0'));
    // qtype A, qclass IN
    CHECK(static_cast<unsigned char>(q[q.size() - 4]) == 0);
    CHECK(static_cast<unsigned char>(q[q.size() - 3]) == kTypeA);
    CHECK(static_cast<unsigned char>(q[q.size() - 1]) == kClassIn);
}

TEST_CASE("encode_query rejects unencodable names") {
    CHECK(encode_query(1, "").empty());
    CHECK(encode_query(1, std::string(64, 'a') + ".example").empty());  // label > 63
}

TEST_CASE("query round trip") {
    std::string raw = encode_query(0xBEEF, "WWW.Example.COM");
    auto q = parse_query(raw);
    REQUIRE(q.has_value());
    CHECK(q->id == 0xBEEF);
    CHECK(q->qname == "www.example.com");
    CHECK(q->qtype == kTypeA);
    CHECK(q->qclass == kClassIn);
}

TEST_CASE("response round trip with answers") {
    auto q = parse_query(encode_query(7, "host.example"));
    REQUIRE(q.has_value());
    std::vector<AnswerRecord> answers{
        {"host.example", Ipv4::parse("93.184.216.34").value(), 300},
        {"host.example", Ipv4::parse("93.184.216.35").value(), 120},
    };
    std::string raw = encode_response(*q, answers, 0);
    auto r = parse_response(raw);
    REQUIRE(r.has_value());
    CHECK(r->id == 7);
    CHECK(r->is_response);
    CHECK(r->rcode == 0);
    CHECK(r->qname == "host.example");
    REQUIRE(r->a_records.size() == 2);
    CHECK(r->a_records[0].to_string() == "93.184.216.34");
    CHECK(r->a_records[1].to_string() == "93.184.216.35");
    REQUIRE(r->min_ttl.has_value());
    CHECK(*r->min_ttl == 120);  // min across records
}

TEST_CASE("response round trip nxdomain") {
    auto q = parse_query(encode_query(9, "gone.example"));
    REQUIRE(q.has_value());
    std::string raw = encode_response(*q, {}, 3);
    auto r = parse_response(raw);
    REQUIRE(r.has_value());
    CHECK(r->rcode == 3);
    CHECK(r->a_records.empty());
    CHECK(!r->min_ttl.has_value());
}

TEST_CASE("parse_response deduplicates repeated A records") {
    auto q = parse_query(encode_query(11, "dup.example"));
    REQUIRE(q.has_value());
    auto ip = Ipv4::parse("198.51.100.9").value();
    std::string raw = encode_response(*q, {{"dup.example", ip, 60}, {"dup.example", ip, 60}}, 0);
    auto r = parse_response(raw);
    REQUIRE(r.has_value());
    CHECK(r->a_records.size() == 1);
}

TEST_CASE("parse_response rejects garbage") {
    CHECK(!parse_response("").has_value());
    CHECK(!parse_response("short").has_value());
    std::string truncated_header(11, '\0');
    CHECK(!parse_response(truncated_header).has_value());
}

TEST_CASE("parse_response reads TC bit") {
    std::string raw = encode_response(*parse_query(encode_query(2, "a.example")), {}, 0);
    // QR|TC live in byte 2: set TC (0x02) on the encoded response
    raw[2] = static_cast<char>(static_cast<unsigned char>(raw[2]) | 0x02);
    auto r = parse_response(raw);
    REQUIRE(r.has_value());
    CHECK(r->truncated);
}

TEST_CASE("parse_query ignores responses") {
    std::string raw = encode_response(*parse_query(encode_query(3, "b.example")), {}, 0);
    CHECK(!parse_query(raw).has_value());
}
