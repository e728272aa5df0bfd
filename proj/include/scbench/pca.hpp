#ifndef SCBENCH_PCA_HPP
#define SCBENCH_PCA_HPP

#include <Eigen/Dense>

#include "embedding.hpp"
#include "matrix.hpp"

/**
 * @file pca.hpp
 * @brief Principal components of a dense cells-by-genes matrix.
 */

namespace scbench {

enum class PcaSolver {
    /** Covariance path when genes do not outnumber cells, Gram path otherwise. */
    automatic,
    /** Eigendecomposition of the genes-by-genes sample covariance. */
    covariance,
    /** Eigendecomposition of the cells-by-cells Gram matrix of the centered data. */
    gram
};

struct PcaOptions {
    std::size_t components = 2;
    PcaSolver solver = PcaSolver::automatic;
};

struct PcaModel {
    /** One orthonormal component per row, `components x n_genes`. */
    Eigen::MatrixXd components;
    /** Sample variance (divisor n - 1) captured by each component, nonincreasing. */
    Eigen::VectorXd explained_variance;
    Eigen::VectorXd explained_variance_ratio;
    Eigen::VectorXd column_means;
    double total_variance = 0;
};

struct PcaResult {
    Embedding embedding;
    PcaModel model;
};

/**
 * Columns are mean-centered but not scaled. Component signs are fixed so that each component's
 * largest-magnitude element is positive. Scores are the centered data projected onto the components.
 *
 * Throws `std::invalid_argument` if `components` is zero or exceeds `min(n_cells, n_genes)`,
 * and `DataError` for fewer than two cells or non-finite input.
 */
PcaResult pca_fit_transform(const Eigen::MatrixXd& x, const PcaOptions& options = {});

PcaResult pca_fit_transform(const ExpressionMatrix& x, const PcaOptions& options = {});

}

#endif
