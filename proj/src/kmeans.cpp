#include "scbench/cluster.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "scbench/matrix.hpp"
#include "scbench/parallel.hpp"
#include "scbench/rng.hpp"

namespace scbench {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double squared_distance(const RowMatrix& a, Eigen::Index i, const RowMatrix& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

RowMatrix plus_plus_seeds(const RowMatrix& x, std::size_t k, Rng& rng) {
    const Eigen::Index n = x.rows();
    RowMatrix centers(static_cast<Eigen::Index>(k), x.cols());
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);

    auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    centers.row(0) = x.row(first);
    chosen[static_cast<std::size_t>(first)] = 1;

    std::vector<double> closest(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        closest[static_cast<std::size_t>(i)] = squared_distance(x, i, centers, 0);
    }

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0;
        for (double d : closest) {
            total += d;
        }
        Eigen::Index pick = -1;
        if (total > 0) {
            double target = rng.uniform() * total;
            double running = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                running += closest[static_cast<std::size_t>(i)];
                if (running > target && closest[static_cast<std::size_t>(i)] > 0) {
                    pick = i;
                    break;
                }
            }
            if (pick < 0) {
                // Rounding left the target past the last positive weight.
                for (Eigen::Index i = n - 1; i >= 0; --i) {
                    if (closest[static_cast<std::size_t>(i)] > 0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            for (Eigen::Index i = 0; i < n; ++i) {
                if (!chosen[static_cast<std::size_t>(i)]) {
                    pick = i;
                    break;
                }
            }
        }
        chosen[static_cast<std::size_t>(pick)] = 1;
        centers.row(static_cast<Eigen::Index>(c)) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            auto& d = closest[static_cast<std::size_t>(i)];
            d = std::min(d, squared_distance(x, i, centers, static_cast<Eigen::Index>(c)));
        }
    }
    return centers;
}

struct RestartOutcome {
    std::vector<std::size_t> labels;
    RowMatrix centroids;
    std::vector<double> trace;
    double sse = std::numeric_limits<double>::infinity();
};

RestartOutcome lloyd(const RowMatrix& x, std::size_t k, const KmeansOptions& options, std::uint64_t seed) {
    const Eigen::Index n = x.rows();
    const auto kk = static_cast<Eigen::Index>(k);
    Rng rng(seed);
    RestartOutcome out;
    out.centroids = plus_plus_seeds(x, k, rng);
    out.labels.assign(static_cast<std::size_t>(n), 0);
    std::vector<double> dist(static_cast<std::size_t>(n));
    std::vector<std::size_t> sizes(k);

    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < std::max<std::size_t>(options.max_iterations, 1); ++iter) {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = 0;
            for (Eigen::Index c = 0; c < kk; ++c) {
                double d = squared_distance(x, i, out.centroids, c);
                if (d < best) {
                    best = d;
                    best_c = static_cast<std::size_t>(c);
                }
            }
            out.labels[static_cast<std::size_t>(i)] = best_c;
            dist[static_cast<std::size_t>(i)] = best;
            ++sizes[best_c];
        }

        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] != 0) {
                continue;
            }
            Eigen::Index far = -1;
            double far_d = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                auto ui = static_cast<std::size_t>(i);
                if (sizes[out.labels[ui]] > 1 && dist[ui] > far_d) {
                    far_d = dist[ui];
                    far = i;
                }
            }
            auto uf = static_cast<std::size_t>(far);
            --sizes[out.labels[uf]];
            out.labels[uf] = c;
            sizes[c] = 1;
            dist[uf] = 0;
            out.centroids.row(static_cast<Eigen::Index>(c)) = x.row(far);
        }

        out.centroids.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            out.centroids.row(static_cast<Eigen::Index>(out.labels[static_cast<std::size_t>(i)])) += x.row(i);
        }
        for (Eigen::Index c = 0; c < kk; ++c) {
            out.centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);
        }

        double sse = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            sse += squared_distance(x, i, out.centroids, static_cast<Eigen::Index>(out.labels[static_cast<std::size_t>(i)]));
        }
        out.trace.push_back(sse);
        out.sse = sse;
        if (previous - sse < options.tolerance) {
            break;
        }
        previous = sse;
    }
    return out;
}

}

double within_cluster_sse(const Eigen::MatrixXd& x, const std::vector<std::size_t>& labels, std::size_t k) {
    if (labels.size() != static_cast<std::size_t>(x.rows())) {
        throw DataError("label count does not match the number of rows");
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), x.cols());
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        sums.row(static_cast<Eigen::Index>(labels[i])) += x.row(static_cast<Eigen::Index>(i));
        ++sizes[labels[i]];
    }
    double sse = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        Eigen::RowVectorXd mean = sums.row(static_cast<Eigen::Index>(labels[i])) / static_cast<double>(sizes[labels[i]]);
        sse += (x.row(static_cast<Eigen::Index>(i)) - mean).squaredNorm();
    }
    return sse;
}

KmeansResult kmeans(const Eigen::MatrixXd& x, const KmeansOptions& options) {
    const auto n = static_cast<std::size_t>(x.rows());
    if (options.k == 0 || options.k > n) {
        throw std::invalid_argument("k-means needs 1 <= k <= n (k = " + std::to_string(options.k) + ", n = " + std::to_string(n) + ")");
    }
    if (!x.allFinite()) {
        throw DataError("k-means input contains non-finite values");
    }
    RowMatrix rows = x;
    std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
    std::vector<RestartOutcome> outcomes(restarts);
    parallel_for(restarts, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            outcomes[r] = lloyd(rows, options.k, options, derive_seed(options.seed, r));
        }
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < restarts; ++r) {
        if (outcomes[r].sse < outcomes[best].sse) {
            best = r;
        }
    }

    KmeansResult out;
    out.clusters.labels = std::move(outcomes[best].labels);
    out.clusters.k = options.k;
    out.clusters.objective = outcomes[best].sse;
    out.clusters.seed = options.seed;
    out.clusters.restarts = restarts;
    out.centroids = outcomes[best].centroids;
    out.sse_trace = std::move(outcomes[best].trace);
    out.best_restart = best;
    return out;
}

}
