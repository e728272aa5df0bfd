#ifndef SCBENCH_DISTANCE_HPP
#define SCBENCH_DISTANCE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace scbench {

enum class Metric {
    euclidean,
    /** 1 - Pearson correlation between two rows, in [0, 2]. */
    one_minus_correlation
};

const char* to_string(Metric m);

/** Accepts `euclidean` and `one-minus-correlation` (or `one_minus_correlation`). */
Metric parse_metric(const std::string& name);

/**
 * @brief Symmetric distance table with a zero diagonal, stored as the upper triangle.
 */
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), upper_(n < 2 ? 0 : n * (n - 1) / 2, 0.0) {}

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const {
        if (i == j) {
            return 0.0;
        }
        return upper_[offset(i, j)];
    }

    void set(std::size_t i, std::size_t j, double value) { upper_[offset(i, j)] = value; }

    /** Row `i`'s entries for columns `i + 1 .. n - 1`, contiguous. */
    double* row_tail(std::size_t i) { return upper_.data() + offset(i, i + 1); }

private:
    std::size_t offset(std::size_t i, std::size_t j) const {
        if (i > j) {
            std::swap(i, j);
        }
        return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
    }

    std::size_t n_ = 0;
    std::vector<double> upper_;
};

/**
 * All pairwise distances between the rows of `x`.
 * Throws `DataError` for fewer than two rows, non-finite input, or (correlation metric) a row with zero variance.
 */
DistanceMatrix pairwise_distances(const Eigen::MatrixXd& x, Metric metric);

/**
 * Wrap a precomputed square table after checking it is finite, non-negative, symmetric and zero on the diagonal.
 */
DistanceMatrix distance_matrix_from_square(const Eigen::MatrixXd& square);

}

#endif
