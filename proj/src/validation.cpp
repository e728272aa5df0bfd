#include "scbench/cluster.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include "scbench/matrix.hpp"
#include "scbench/parallel.hpp"

namespace scbench {

SilhouetteReport silhouette(const DistanceMatrix& distances, const std::vector<std::size_t>& labels) {
    const std::size_t n = distances.size();
    if (labels.size() != n) {
        throw DataError("label count does not match the distance table");
    }
    std::size_t k = 0;
    for (auto l : labels) {
        k = std::max(k, l + 1);
    }
    if (k < 2) {
        throw DataError("silhouette needs at least two clusters");
    }
    std::vector<std::size_t> sizes(k, 0);
    for (auto l : labels) {
        ++sizes[l];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] == 0) {
            throw DataError("cluster " + std::to_string(c) + " is empty");
        }
    }

    SilhouetteReport out;
    out.per_point.assign(n, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        std::vector<double> sums(k);
        for (std::size_t i = begin; i < end; ++i) {
            std::size_t own = labels[i];
            if (sizes[own] == 1) {
                out.per_point[i] = 0.0;
                continue;
            }
            std::fill(sums.begin(), sums.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    sums[labels[j]] += distances(i, j);
                }
            }
            double a = sums[own] / static_cast<double>(sizes[own] - 1);
            double b = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                if (c != own) {
                    b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
                }
            }
            double denom = std::max(a, b);
            out.per_point[i] = denom > 0 ? (b - a) / denom : 0.0;
        }
    });

    out.per_cluster_mean.assign(k, 0.0);
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total += out.per_point[i];
        out.per_cluster_mean[labels[i]] += out.per_point[i];
    }
    for (std::size_t c = 0; c < k; ++c) {
        out.per_cluster_mean[c] /= static_cast<double>(sizes[c]);
    }
    out.mean = total / static_cast<double>(n);
    return out;
}

SilhouetteReport silhouette(const Eigen::MatrixXd& x, const std::vector<std::size_t>& labels, Metric metric) {
    return silhouette(pairwise_distances(x, metric), labels);
}

double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    if (a.size() != b.size()) {
        throw DataError("label vectors have different lengths");
    }
    const std::size_t n = a.size();
    auto pairs = [](double v) { return v * (v - 1) / 2; };

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> table;
    std::map<std::size_t, std::size_t> rows, cols;
    for (std::size_t i = 0; i < n; ++i) {
        ++table[{ a[i], b[i] }];
        ++rows[a[i]];
        ++cols[b[i]];
    }
    double index = 0, row_pairs = 0, col_pairs = 0;
    for (const auto& [key, count] : table) {
        index += pairs(static_cast<double>(count));
    }
    for (const auto& [key, count] : rows) {
        row_pairs += pairs(static_cast<double>(count));
    }
    for (const auto& [key, count] : cols) {
        col_pairs += pairs(static_cast<double>(count));
    }
    double total = pairs(static_cast<double>(n));
    if (total == 0) {
        return 1.0;
    }
    double expected = row_pairs * col_pairs / total;
    double maximum = 0.5 * (row_pairs + col_pairs);
    if (maximum == expected) {
        // Both partitions trivial (all-singletons or a single block).
        return 1.0;
    }
    return (index - expected) / (maximum - expected);
}

std::vector<std::size_t> encode_labels(const std::vector<std::string>& labels) {
    std::unordered_map<std::string, std::size_t> codes;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        auto it = codes.emplace(l, codes.size()).first;
        out.push_back(it->second);
    }
    return out;
}

}
