#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "cenprobe/types.hpp"

namespace cenprobe::sim {

/// One emulated origin site. Unset fields get deterministic defaults derived
/// from the domain name (and the scenario seed) when the network comes up.
struct OriginSpec {
    std::string ip;  // virtual address; auto-assigned when empty
    int status = 200;
    std::string body;  // generated when empty and status family is 2xx
    std::map<std::string, std::string> headers;
    std::string redirect;  // Location for 3xx statuses
};

struct DnsRule {
    enum class Action { nxdomain, servfail, refused, bogon, inject, timeout };
    Action action = Action::nxdomain;
    std::string ip;  // answer for bogon/inject
};
std::string_view to_string(DnsRule::Action a);

struct HttpRule {
    enum class Action { rst, blockpage, redirect, error, timeout };
    Action action = Action::rst;
    std::string target;  // Location for redirect
    int status = 0;      // override; defaults per action
    std::string body;    // override blockpage/error body
};
std::string_view to_string(HttpRule::Action a);

struct TcpRule {
    enum class Action { drop, refuse };
    Action action = Action::drop;
    std::uint16_t port = 0;  // 0 = every port
};
std::string_view to_string(TcpRule::Action a);

/// Declarative description of the emulated network and the censor's policy,
/// loaded from JSON. See docs/scenario.md for the schema.
struct Scenario {
    std::uint64_t seed = 0;
    std::map<std::string, OriginSpec> origins;
    std::map<std::string, DnsRule> dns_rules;
    std::map<std::string, HttpRule> http_rules;
    std::set<std::string> sni_blocklist;
    std::map<std::string, TcpRule> tcp_rules;
};

/// Parses and validates; throws std::runtime_error naming the offending
/// JSON path on malformed input.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& json_text);

}  // namespace cenprobe::sim
