#pragma once

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cenprobe/dns.hpp"
#include "cenprobe/types.hpp"

namespace cenprobe {

/// A resolution channel: either a classic UDP/53 resolver ("address" is
/// host:port) or a DNS-over-HTTPS endpoint ("address" is an https:// URL).
struct ChannelSpec {
    enum class Kind { udp53, doh };
    std::string id;
    Kind kind = Kind::udp53;
    std::string address;
    bool is_control = false;
};

std::string_view to_string(ChannelSpec::Kind k);
std::optional<ChannelSpec::Kind> channel_kind_from_string(std::string_view s);

/// Issues one A-record lookup over the given channel. UDP lookups verify the
/// transaction id and question name before accepting a reply and fall back to
/// TCP when the response is truncated.
DnsOutcome resolve_via_channel(const ChannelSpec& channel, const Domain& domain,
                               std::chrono::milliseconds timeout);

/// TTL-honoring cache for control-channel answers. Entries live for
/// min(ttl, max_age); errors and timeouts are never cached.
class ControlCache {
public:
    explicit ControlCache(std::chrono::seconds max_age = std::chrono::seconds(300))
        : max_age_(max_age) {}

    std::optional<DnsOutcome> get(const std::string& channel_id, const Domain& domain);
    void put(const std::string& channel_id, const Domain& domain, const DnsOutcome& outcome,
             std::chrono::seconds ttl);

    size_t size() const;

private:
    struct Entry {
        DnsOutcome outcome;
        std::chrono::steady_clock::time_point expires;
    };
    std::chrono::seconds max_age_;
    mutable std::mutex mu_;
    std::map<std::pair<std::string, std::string>, Entry> entries_;
};

/// resolve_via_channel with a read-through cache in front of control channels.
DnsOutcome resolve_with_cache(ControlCache& cache, const ChannelSpec& channel,
                              const Domain& domain, std::chrono::milliseconds timeout);

}  // namespace cenprobe
