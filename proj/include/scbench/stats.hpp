#ifndef SCBENCH_STATS_HPP
#define SCBENCH_STATS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace scbench {

/**
 * Quantile of `sorted` (ascending) by linear interpolation between closest ranks,
 * i.e. position `(n - 1) * p` in zero-based indexing.
 */
inline double sorted_quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) {
        throw std::invalid_argument("quantile of an empty vector");
    }
    double pos = static_cast<double>(sorted.size() - 1) * p;
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

}

#endif
