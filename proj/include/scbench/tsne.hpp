#ifndef SCBENCH_TSNE_HPP
#define SCBENCH_TSNE_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "embedding.hpp"
#include "matrix.hpp"

/**
 * @file tsne.hpp
 * @brief Exact t-SNE.
 *
 * Affinities are computed over all pairs (no neighbour approximation), so cost and memory are quadratic in the number of cells.
 * A run is a pure function of the input, the options and the seed; all reductions are in fixed order,
 * so results do not depend on `SCBENCH_THREADS`.
 */

namespace scbench {

enum class TsneInit {
    /** Leading principal component scores rescaled so the first column has standard deviation `init_scale`. */
    pca,
    /** Independent normals with standard deviation `init_scale`. */
    random
};

struct TsneOptions {
    double perplexity = 30;
    std::size_t dims = 2;
    std::size_t iterations = 1000;
    double learning_rate = 200;
    double exaggeration = 12;
    /** Iterations run with exaggerated affinities. */
    std::size_t exaggeration_iterations = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch = 250;
    TsneInit init = TsneInit::pca;
    double init_scale = 1e-4;
    /** Reduce the input to this many principal components first when it has more columns; 0 disables. */
    std::size_t pca_dims = 50;
    std::uint64_t seed = 42;
    /** Record KL(P || Q) after every iteration. */
    bool track_kl = true;
};

/** Row-major dense square table. */
struct SquareTable {
    std::size_t n = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

SquareTable squared_euclidean_distances(const Eigen::MatrixXd& x);

struct Calibration {
    /** Row `i` holds p(j | i); the diagonal is zero. */
    SquareTable conditional;
    /** Gaussian precision `1 / (2 sigma^2)` per point. */
    std::vector<double> beta;
    std::vector<double> achieved_perplexity;
    /** Points whose bisection stopped before reaching the tolerance. */
    std::size_t unconverged = 0;
};

/**
 * Per-point bandwidth search: the precision is bracketed by doubling or halving, then bisected
 * (at most 50 steps) until the perplexity of p(. | i) is within `tolerance` of the target.
 */
Calibration calibrate_affinities(const SquareTable& squared_distances, double perplexity, double tolerance = 1e-5);

/** Symmetrize conditionals: p_ij = (p(j|i) + p(i|j)) / (2n). */
SquareTable joint_probabilities(const SquareTable& conditional);

/**
 * KL(P || Q) where Q is the Student-t (one degree of freedom) affinity of `coordinates`.
 * Throws `DataError` unless `p` is non-negative and sums to 1 within 1e-9.
 */
double kl_divergence(const SquareTable& p, const Eigen::MatrixXd& coordinates);

struct TsneResult {
    Embedding embedding;
    /** KL divergence after each iteration, empty unless `track_kl`. */
    std::vector<double> kl_trace;
    Calibration calibration;
    SquareTable joint;
};

/**
 * Throws `std::invalid_argument` for fewer than four cells or `3 * perplexity >= n_cells`,
 * and `DataError` for non-finite input.
 */
TsneResult tsne(const Eigen::MatrixXd& x, const TsneOptions& options = {});

TsneResult tsne(const ExpressionMatrix& x, const TsneOptions& options = {});

}

#endif
