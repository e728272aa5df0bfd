#ifndef SCBENCH_CLUSTER_HPP
#define SCBENCH_CLUSTER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "distance.hpp"

/**
 * @file cluster.hpp
 * @brief k-means, agglomerative clustering, and partition validation.
 *
 * Ties are broken towards the smallest index everywhere, so every routine is bit-reproducible.
 */

namespace scbench {

struct ClusterResult {
    /** Per-cell labels in `0 .. k - 1`. */
    std::vector<std::size_t> labels;
    std::size_t k = 0;
    /** Within-cluster sum of squares; absent for dendrogram cuts. */
    std::optional<double> objective;
    std::uint64_t seed = 0;
    std::size_t restarts = 0;
};

struct KmeansOptions {
    std::size_t k = 2;
    std::uint64_t seed = 42;
    std::size_t restarts = 10;
    std::size_t max_iterations = 300;
    /** Stop once an iteration improves the SSE by less than this. */
    double tolerance = 1e-6;
};

struct KmeansResult {
    ClusterResult clusters;
    /** `k x dims`. */
    Eigen::MatrixXd centroids;
    /** SSE after each Lloyd iteration of the winning restart. */
    std::vector<double> sse_trace;
    std::size_t best_restart = 0;
};

/**
 * Lloyd's algorithm from k-means++ seeds, keeping the restart with the lowest SSE.
 * Restart `r` draws from `derive_seed(seed, r)`. A cluster left empty by an assignment step
 * takes the point farthest from its centroid.
 *
 * Throws `std::invalid_argument` for `k == 0` or `k > n`, `DataError` for non-finite input.
 */
KmeansResult kmeans(const Eigen::MatrixXd& x, const KmeansOptions& options);

/** Within-cluster sum of squared euclidean distances to the cluster means. */
double within_cluster_sse(const Eigen::MatrixXd& x, const std::vector<std::size_t>& labels, std::size_t k);

enum class Linkage {
    single,
    complete,
    average,
    /** Lance-Williams on squared euclidean distances; heights are reported on that squared scale. */
    ward
};

const char* to_string(Linkage l);
Linkage parse_linkage(const std::string& name);

struct Merge {
    /** Node ids: leaves are `0 .. n - 1`, merge `s` creates node `n + s`. `a < b`. */
    std::size_t a;
    std::size_t b;
    double height;
    /** Leaves under the new node. */
    std::size_t size;
};

struct Dendrogram {
    std::size_t n_leaves = 0;
    std::vector<Merge> merges;
    Metric metric = Metric::euclidean;
    Linkage linkage = Linkage::ward;
};

/**
 * Agglomerative clustering with Lance-Williams updates.
 * Among equally close pairs the one with the smallest `(a, b)` node-id pair merges first.
 * Throws `std::invalid_argument` for Ward with a non-euclidean metric.
 */
Dendrogram hierarchical(const Eigen::MatrixXd& x, Metric metric, Linkage linkage);

/**
 * As above from precomputed distances. For Ward the distances must be euclidean; they are squared internally.
 */
Dendrogram hierarchical(const DistanceMatrix& distances, Metric metric, Linkage linkage);

/**
 * Apply the first `n - k` merges. Clusters are labelled in ascending order of their smallest member index.
 */
ClusterResult cut_dendrogram(const Dendrogram& dendrogram, std::size_t k);

struct SilhouetteReport {
    std::vector<double> per_point;
    double mean = 0;
    /** Indexed by label. */
    std::vector<double> per_cluster_mean;
};

/**
 * Silhouette widths `(b - a) / max(a, b)`; points in singleton clusters get 0.
 * Labels must cover `0 .. k - 1` with `k >= 2` and no empty cluster, otherwise `DataError`.
 */
SilhouetteReport silhouette(const DistanceMatrix& distances, const std::vector<std::size_t>& labels);

SilhouetteReport silhouette(const Eigen::MatrixXd& x, const std::vector<std::size_t>& labels, Metric metric = Metric::euclidean);

/** Adjusted Rand index; 1 for identical partitions up to relabelling. */
double adjusted_rand_index(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

/** Map arbitrary string labels to integers in order of first appearance. */
std::vector<std::size_t> encode_labels(const std::vector<std::string>& labels);

}

#endif
