#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cenprobe/types.hpp"

namespace cenprobe::dns::wire {

constexpr std::uint16_t kTypeA = 1;
constexpr std::uint16_t kClassIn = 1;

// A-record query with RD set. Empty string on an unencodable name.
std::string encode_query(std::uint16_t id, std::string_view qname);

struct ParsedResponse {
    std::uint16_t id = 0;
    bool is_response = false;
    bool truncated = false;
    int rcode = 0;
    std::string qname;          // first question, lowercased
    std::vector<Ipv4> a_records;  // wire order, deduplicated
    std::optional<std::uint32_t> min_ttl;
};

std::optional<ParsedResponse> parse_response(std::string_view payload);

struct Question {
    std::uint16_t id = 0;
    std::string qname;  // lowercased
    std::uint16_t qtype = 0;
    std::uint16_t qclass = 0;
};

// Used by the simulator's resolver endpoints.
std::optional<Question> parse_query(std::string_view payload);

struct AnswerRecord {
    std::string name;
    Ipv4 ip;
    std::uint32_t ttl = 60;
};

std::string encode_response(const Question& q, const std::vector<AnswerRecord>& answers,
                            int rcode);

}  // namespace cenprobe::dns::wire
