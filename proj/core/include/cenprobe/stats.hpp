#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

namespace cenprobe::stats {

double mean(const std::vector<double>& xs);

// Population standard deviation (divide by N). The 3-sigma comparisons in the
// DNS and HTTP classifiers treat the control set as the whole population.
double pop_stddev(const std::vector<double>& xs);

// Statistical mode. Returns nullopt when no value has a strict majority
// (count * 2 > N), including ties.
template <typename T>
std::optional<T> strict_majority_mode(const std::vector<T>& xs) {
    if (xs.empty()) return std::nullopt;
    std::map<T, size_t> counts;
    for (const auto& x : xs) ++counts[x];
    const T* best = nullptr;
    size_t best_count = 0;
    for (const auto& [value, count] : counts) {
        if (count > best_count) {
            best = &value;
            best_count = count;
        }
    }
    if (best_count * 2 <= xs.size()) return std::nullopt;
    return *best;
}

}  // namespace cenprobe::stats
