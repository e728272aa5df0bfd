#include "scbench/cluster.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "scbench/matrix.hpp"

namespace scbench {

const char* to_string(Linkage l) {
    switch (l) {
        case Linkage::single: return "single";
        case Linkage::complete: return "complete";
        case Linkage::average: return "average";
        case Linkage::ward: return "ward";
    }
    return "unknown";
}

Linkage parse_linkage(const std::string& name) {
    if (name == "single") return Linkage::single;
    if (name == "complete") return Linkage::complete;
    if (name == "average") return Linkage::average;
    if (name == "ward") return Linkage::ward;
    throw std::invalid_argument("unknown linkage '" + name + "'");
}

namespace {

struct Candidate {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t lo = std::numeric_limits<std::size_t>::max();
    std::size_t hi = std::numeric_limits<std::size_t>::max();

    bool operator<(const Candidate& other) const {
        return std::tie(distance, lo, hi) < std::tie(other.distance, other.lo, other.hi);
    }
};

/**
 * Generic agglomeration over slots: each active slot caches its nearest active neighbour,
 * so a merge only rescans the slots whose cached neighbour was one of the merged pair.
 */
class Agglomerator {
public:
    Agglomerator(DistanceMatrix distances, Linkage linkage)
        : d_(std::move(distances)), linkage_(linkage), n_(d_.size()),
          node_(n_), size_(n_, 1), active_(n_, 1), nearest_(n_), best_(n_)
    {
        std::iota(node_.begin(), node_.end(), 0);
        for (std::size_t s = 0; s < n_; ++s) {
            rescan(s);
        }
    }

    std::vector<Merge> run() {
        std::vector<Merge> merges;
        merges.reserve(n_ - 1);
        for (std::size_t step = 0; step + 1 < n_; ++step) {
            std::size_t s = n_;
            for (std::size_t t = 0; t < n_; ++t) {
                if (active_[t] && (s == n_ || best_[t] < best_[s])) {
                    s = t;
                }
            }
            std::size_t t = nearest_[s];
            const Candidate chosen = best_[s];
            double height = chosen.distance;
            if (t < s) {
                std::swap(s, t);
            }

            std::size_t ns = size_[s], nt = size_[t];
            for (std::size_t k = 0; k < n_; ++k) {
                if (!active_[k] || k == s || k == t) {
                    continue;
                }
                d_.set(k, s, update(d_(k, s), d_(k, t), height, ns, nt, size_[k]));
            }

            merges.push_back({ chosen.lo, chosen.hi, height, ns + nt });
            active_[t] = 0;
            size_[s] = ns + nt;
            node_[s] = n_ + step;

            rescan(s);
            for (std::size_t k = 0; k < n_; ++k) {
                if (!active_[k] || k == s) {
                    continue;
                }
                if (nearest_[k] == s || nearest_[k] == t) {
                    rescan(k);
                } else {
                    Candidate c = candidate(k, s);
                    if (c < best_[k]) {
                        best_[k] = c;
                        nearest_[k] = s;
                    }
                }
            }
        }
        return merges;
    }

private:
    Candidate candidate(std::size_t a, std::size_t b) const {
        Candidate c;
        c.distance = d_(a, b);
        c.lo = std::min(node_[a], node_[b]);
        c.hi = std::max(node_[a], node_[b]);
        return c;
    }

    void rescan(std::size_t s) {
        best_[s] = Candidate{};
        nearest_[s] = n_;
        for (std::size_t k = 0; k < n_; ++k) {
            if (k == s || !active_[k]) {
                continue;
            }
            Candidate c = candidate(s, k);
            if (nearest_[s] == n_ || c < best_[s]) {
                best_[s] = c;
                nearest_[s] = k;
            }
        }
    }

    double update(double dks, double dkt, double dst, std::size_t ns, std::size_t nt, std::size_t nk) const {
        switch (linkage_) {
            case Linkage::single:
                return std::min(dks, dkt);
            case Linkage::complete:
                return std::max(dks, dkt);
            case Linkage::average:
                return (static_cast<double>(ns) * dks + static_cast<double>(nt) * dkt) / static_cast<double>(ns + nt);
            case Linkage::ward: {
                double a = static_cast<double>(ns + nk), b = static_cast<double>(nt + nk), c = static_cast<double>(nk);
                return (a * dks + b * dkt - c * dst) / static_cast<double>(ns + nt + nk);
            }
        }
        return 0;
    }

    DistanceMatrix d_;
    Linkage linkage_;
    std::size_t n_;
    std::vector<std::size_t> node_;
    std::vector<std::size_t> size_;
    std::vector<char> active_;
    std::vector<std::size_t> nearest_;
    std::vector<Candidate> best_;
};

}

Dendrogram hierarchical(const DistanceMatrix& distances, Metric metric, Linkage linkage) {
    if (linkage == Linkage::ward && metric != Metric::euclidean) {
        throw std::invalid_argument("Ward linkage requires the euclidean metric");
    }
    const std::size_t n = distances.size();
    if (n < 2) {
        throw DataError("hierarchical clustering needs at least two points");
    }
    DistanceMatrix working = distances;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = working(i, j);
            if (!std::isfinite(v) || v < 0) {
                throw DataError("distance table has a negative or non-finite entry");
            }
            if (linkage == Linkage::ward) {
                working.set(i, j, v * v);
            }
        }
    }

    Dendrogram out;
    out.n_leaves = n;
    out.metric = metric;
    out.linkage = linkage;
    out.merges = Agglomerator(std::move(working), linkage).run();
    return out;
}

Dendrogram hierarchical(const Eigen::MatrixXd& x, Metric metric, Linkage linkage) {
    if (linkage == Linkage::ward && metric != Metric::euclidean) {
        throw std::invalid_argument("Ward linkage requires the euclidean metric");
    }
    return hierarchical(pairwise_distances(x, metric), metric, linkage);
}

ClusterResult cut_dendrogram(const Dendrogram& dendrogram, std::size_t k) {
    const std::size_t n = dendrogram.n_leaves;
    if (k < 1 || k > n) {
        throw std::invalid_argument("cut size must lie in [1, " + std::to_string(n) + "]");
    }
    if (dendrogram.merges.size() + 1 != n) {
        throw DataError("dendrogram does not have n - 1 merges");
    }

    // Union-find over leaves; node ids >= n resolve to a representative leaf.
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::vector<std::size_t> representative(n - 1);
    auto leaf_of = [&](std::size_t node) { return node < n ? node : representative[node - n]; };

    for (std::size_t s = 0; s < n - k; ++s) {
        const auto& m = dendrogram.merges[s];
        std::size_t ra = find(leaf_of(m.a)), rb = find(leaf_of(m.b));
        std::size_t root = std::min(ra, rb);
        parent[std::max(ra, rb)] = root;
        representative[s] = root;
    }

    ClusterResult out;
    out.k = k;
    out.labels.assign(n, 0);
    std::vector<std::size_t> label_of_root(n, n);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = find(i);
        if (label_of_root[r] == n) {
            label_of_root[r] = next++;
        }
        out.labels[i] = label_of_root[r];
    }
    return out;
}

}
