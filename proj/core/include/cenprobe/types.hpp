#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cenprobe {

/// IPv4 address. Only A records are probed; IPv6 is out of scope.
class Ipv4 {
public:
    Ipv4() = default;
    explicit constexpr Ipv4(std::uint32_t host_order) : addr_(host_order) {}

    static std::optional<Ipv4> parse(std::string_view dotted);

    std::uint32_t value() const { return addr_; }
    std::string to_string() const;

    auto operator<=>(const Ipv4&) const = default;

private:
    std::uint32_t addr_ = 0;  // host byte order
};

// Tie-breaks in MRF and frequency tables compare the dotted-quad form, so
// "10.0.0.1" sorts after "1.2.3.4".
bool lexicographic_less(const Ipv4& a, const Ipv4& b);

/// A normalized DNS name: lowercase, punycoded, no scheme/port/path,
/// no trailing dot. Construct through parse() to keep the invariants.
class Domain {
public:
    Domain() = default;

    // Validates label syntax on an already-normalized name.
    static std::optional<Domain> parse(std::string_view name);

    const std::string& name() const { return name_; }
    bool empty() const { return name_.empty(); }

    auto operator<=>(const Domain&) const = default;

private:
    explicit Domain(std::string name) : name_(std::move(name)) {}
    std::string name_;
};

enum class Verdict { censored, uncensored, untestable };

std::string_view to_string(Verdict v);
std::optional<Verdict> verdict_from_string(std::string_view s);

/// Final per-(domain, technique) classification with its evidence trail.
struct ProbeVerdict {
    std::string domain;
    std::string technique;  // "dns" | "tcp" | "http" | "sni"
    Verdict verdict = Verdict::untestable;
    std::string evidence;   // e.g. "error:nxdomain", "rule:status_mismatch"
    std::string note;       // e.g. "unconfirmed_mismatch"
    std::optional<std::string> matched_signature;
    std::optional<std::string> ip;  // set for per-IP http/tcp verdicts
};

namespace technique {
inline constexpr const char* kDns = "dns";
inline constexpr const char* kTcp = "tcp";
inline constexpr const char* kHttp = "http";
inline constexpr const char* kSni = "sni";
}  // namespace technique

}  // namespace cenprobe
