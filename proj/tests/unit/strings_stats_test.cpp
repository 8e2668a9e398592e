#include <doctest.h>

#include <cmath>

#include "cenprobe/stats.hpp"
#include "cenprobe/strings.hpp"

using namespace cenprobe;

TEST_CASE("trim strips ascii whitespace") {
    CHECK(strings::trim("  abc \t\r\n") == "abc");
    CHECK(strings::trim("") == "");
    CHECK(strings::trim("   ") == "");
    CHECK(strings::trim("a b") == "a b");
}

TEST_CASE("to_lower and iequals") {
    CHECK(strings::to_lower("MiXeD-09") == "mixed-09");
    CHECK(strings::iequals("Content-Length", "content-length"));
    CHECK(!strings::iequals("a", "ab"));
}

TEST_CASE("split and join") {
    CHECK(strings::split("a.b..c", '.') == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(strings::split("", '.') == std::vector<std::string>{""});
    CHECK(strings::join({"x", "y", "z"}, "::") == "x::y::z");
    CHECK(strings::join({}, ",") == "");
}

TEST_CASE("starts_with / ends_with") {
    CHECK(strings::starts_with("http://x", "http://"));
    CHECK(!strings::starts_with("ftp://x", "http://"));
    CHECK(strings::ends_with("file.json", ".json"));
    CHECK(!strings::ends_with("js", ".json"));
}

TEST_CASE("base64url rfc 4648 vectors, no padding") {
    // RFC 4648 §10 test vectors, translated to the url-safe alphabet.
    CHECK(strings::base64url_encode("") == "");
    CHECK(strings::base64url_encode("f") == "Zg");
    CHECK(strings::base64url_encode("fo") == "Zm8");
    CHECK(strings::base64url_encode("foo") == "Zm9v");
    CHECK(strings::base64url_encode("foob") == "Zm9vYg");
    CHECK(strings::base64url_encode("fooba") == "Zm9vYmE");
    CHECK(strings::base64url_encode("foobar") == "Zm9vYmFy");
    // url-safe alphabet: 0xfb 0xff encodes to '-' and '_', never '+'/'/'
    std::string bytes("\xfb\xff", 2);
    auto enc = strings::base64url_encode(bytes);
    CHECK(enc.find('+') == std::string::npos);
    CHECK(enc.find('/') == std::string::npos);
    auto dec = strings::base64url_decode(enc);
    REQUIRE(dec.has_value());
    CHECK(*dec == bytes);
}

TEST_CASE("base64url decode rejects junk") {
    CHECK(!strings::base64url_decode("a!b").has_value());
    CHECK(!strings::base64url_decode("a").has_value());  // 1 leftover sextet is invalid
    CHECK(strings::base64url_decode("Zm9vYmFy") == std::string("foobar"));
}

TEST_CASE("base64url round trip over binary") {
    std::string data;
    for (int i = 0; i < 256; ++i) data.push_back(static_cast<char>(i));
    auto enc = strings::base64url_encode(data);
    auto dec = strings::base64url_decode(enc);
    REQUIRE(dec.has_value());
    CHECK(*dec == data);
}

TEST_CASE("split_host_port") {
    auto hp = strings::split_host_port("127.0.0.1:8053");
    REQUIRE(hp.has_value());
    CHECK(hp->first == "127.0.0.1");
    CHECK(hp->second == 8053);
    CHECK(!strings::split_host_port("nohost").has_value());
    CHECK(!strings::split_host_port("x:").has_value());
    CHECK(!strings::split_host_port("x:abc").has_value());
}

TEST_CASE("parse_csv_row quoting") {
    auto row = strings::parse_csv_row("a,\"b,c\",d");
    REQUIRE(row.has_value());
    CHECK(*row == std::vector<std::string>{"a", "b,c", "d"});
    row = strings::parse_csv_row("\"he said \"\"hi\"\"\",x");
    REQUIRE(row.has_value());
    CHECK((*row)[0] == "he said \"hi\"");
    CHECK(!strings::parse_csv_row("\"unterminated").has_value());
    row = strings::parse_csv_row("one");
    REQUIRE(row.has_value());
    CHECK(*row == std::vector<std::string>{"one"});
}

TEST_CASE("mean and population stddev oracle") {
    std::vector<double> xs{0.05, 0.06, 0.05, 0.04, 0.05};
    CHECK(stats::mean(xs) == doctest::Approx(0.05));
    // population sigma: sqrt(mean((x-mu)^2)) = sqrt(0.00004) = 0.00632455...
    CHECK(stats::pop_stddev(xs) == doctest::Approx(0.0063245553).epsilon(1e-6));
    CHECK(stats::pop_stddev({7.0}) == 0.0);
    CHECK(stats::pop_stddev({3.0, 3.0, 3.0}) == 0.0);
}

TEST_CASE("strict_majority_mode") {
    CHECK(stats::strict_majority_mode<int>({200, 200, 200, 404}) == 200);
    CHECK(!stats::strict_majority_mode<int>({200, 404}).has_value());       // tie
    CHECK(!stats::strict_majority_mode<int>({200, 200, 404, 404}).has_value());
    CHECK(!stats::strict_majority_mode<int>({1, 2, 3}).has_value());        // plurality only
    CHECK(!stats::strict_majority_mode<int>({}).has_value());
    CHECK(stats::strict_majority_mode<std::string>({"a", "a", "b"}) == std::string("a"));
    // exactly half is not a strict majority
    CHECK(!stats::strict_majority_mode<int>({5, 5, 6, 7}).has_value());
}
