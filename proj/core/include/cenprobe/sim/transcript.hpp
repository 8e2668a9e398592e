#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace cenprobe::sim {

/// One observable action inside the emulated network, stamped with a
/// globally ordered sequence number.
struct Event {
    std::uint64_t seq = 0;
    std::string actor;   // "relay:test", "dns:c1", "origin:test", "reflector"
    std::string kind;    // "connect", "dns_query", "clienthello", "rst", ...
    std::string detail;  // domain, ip:port, rule applied, ...
};

class Transcript {
public:
    std::uint64_t record(std::string actor, std::string kind, std::string detail);

    std::vector<Event> snapshot() const;
    std::vector<Event> filter(const std::function<bool(const Event&)>& pred) const;
    size_t count(std::string_view kind) const;
    void clear();

private:
    mutable std::mutex mu_;
    std::uint64_t next_seq_ = 0;
    std::vector<Event> events_;
};

}  // namespace cenprobe::sim
