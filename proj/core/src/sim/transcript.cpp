#include "cenprobe/sim/transcript.hpp"

namespace cenprobe::sim {

std::uint64_t Transcript::record(std::string actor, std::string kind, std::string detail) {
    std::lock_guard lock(mu_);
    Event ev;
    ev.seq = next_seq_++;
    ev.actor = std::move(actor);
    ev.kind = std::move(kind);
    ev.detail = std::move(detail);
    events_.push_back(std::move(ev));
    return events_.back().seq;
}

std::vector<Event> Transcript::snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
}

std::vector<Event> Transcript::filter(const std::function<bool(const Event&)>& pred) const {
    std::lock_guard lock(mu_);
    std::vector<Event> out;
    for (const Event& ev : events_)
        if (pred(ev)) out.push_back(ev);
    return out;
}

size_t Transcript::count(std::string_view kind) const {
    std::lock_guard lock(mu_);
    size_t n = 0;
    for (const Event& ev : events_)
        if (ev.kind == kind) ++n;
    return n;
}

void Transcript::clear() {
    std::lock_guard lock(mu_);
    events_.clear();
    next_seq_ = 0;
}

}  // namespace cenprobe::sim
