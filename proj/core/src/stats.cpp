#include "cenprobe/stats.hpp"

#include <cmath>

namespace cenprobe::stats {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double pop_stddev(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double mu = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - mu) * (x - mu);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace cenprobe::stats
