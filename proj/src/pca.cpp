#include "scbench/pca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace scbench {

namespace {

// Extend `basis` (orthonormal rows 0..filled-1) to `target` rows using the standard basis vectors in order.
void complete_orthonormal(Eigen::MatrixXd& basis, Eigen::Index filled) {
    const Eigen::Index dim = basis.cols();
    Eigen::Index next = filled;
    for (Eigen::Index e = 0; e < dim && next < basis.rows(); ++e) {
        Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, e);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index r = 0; r < next; ++r) {
                v -= basis.row(r).dot(v) * basis.row(r).transpose();
            }
        }
        double norm = v.norm();
        if (norm > 1e-6) {
            basis.row(next++) = v.transpose() / norm;
        }
    }
}

void fix_signs(Eigen::MatrixXd& components) {
    for (Eigen::Index r = 0; r < components.rows(); ++r) {
        Eigen::Index best = 0;
        double best_abs = -1;
        for (Eigen::Index c = 0; c < components.cols(); ++c) {
            double a = std::abs(components(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = c;
            }
        }
        if (components(r, best) < 0) {
            components.row(r) *= -1;
        }
    }
}

}

PcaResult pca_fit_transform(const Eigen::MatrixXd& x, const PcaOptions& options) {
    const Eigen::Index n = x.rows(), g = x.cols();
    if (n < 2) {
        throw DataError("PCA needs at least two cells");
    }
    if (!x.allFinite()) {
        throw DataError("PCA input contains non-finite values");
    }
    const auto d = static_cast<Eigen::Index>(options.components);
    if (d == 0 || d > std::min(n, g)) {
        throw std::invalid_argument("PCA components must lie in [1, min(n_cells, n_genes)] = [1, " + std::to_string(std::min(n, g)) + "]");
    }

    PcaModel model;
    model.column_means = x.colwise().mean().transpose();
    Eigen::MatrixXd centered = x.rowwise() - model.column_means.transpose();
    const double denom = static_cast<double>(n - 1);
    model.total_variance = centered.squaredNorm() / denom;

    bool use_gram = options.solver == PcaSolver::gram || (options.solver == PcaSolver::automatic && g > n);
    model.components.resize(d, g);
    model.explained_variance.resize(d);

    if (!use_gram) {
        Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
        if (solver.info() != Eigen::Success) {
            throw DataError("covariance eigendecomposition failed");
        }
        for (Eigen::Index k = 0; k < d; ++k) {
            Eigen::Index src = g - 1 - k;
            model.explained_variance(k) = std::max(solver.eigenvalues()(src), 0.0);
            model.components.row(k) = solver.eigenvectors().col(src).transpose();
        }
    } else {
        Eigen::MatrixXd gram = (centered * centered.transpose()) / denom;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
        if (solver.info() != Eigen::Success) {
            throw DataError("Gram eigendecomposition failed");
        }
        const double top = std::max(solver.eigenvalues()(n - 1), 0.0);
        Eigen::Index filled = 0;
        for (Eigen::Index k = 0; k < d; ++k) {
            double lambda = std::max(solver.eigenvalues()(n - 1 - k), 0.0);
            model.explained_variance(k) = lambda;
            // Directions with (numerically) zero variance cannot be recovered from the Gram matrix.
            if (lambda <= top * 1e-12 || lambda <= 0) {
                model.explained_variance(k) = 0;
                continue;
            }
            Eigen::VectorXd v = centered.transpose() * solver.eigenvectors().col(n - 1 - k) / std::sqrt(denom * lambda);
            model.components.row(filled++) = v.transpose() / v.norm();
        }
        complete_orthonormal(model.components, filled);
    }

    fix_signs(model.components);
    model.explained_variance_ratio = model.total_variance > 0
        ? Eigen::VectorXd(model.explained_variance / model.total_variance)
        : Eigen::VectorXd::Zero(d);

    PcaResult out;
    out.embedding.coordinates = centered * model.components.transpose();
    out.embedding.method = EmbeddingMethod::pca;
    out.embedding.params = {
        { "components", std::to_string(d) },
        { "solver", use_gram ? "gram" : "covariance" },
        { "center", "true" },
        { "scale", "false" },
    };
    out.model = std::move(model);
    return out;
}

PcaResult pca_fit_transform(const ExpressionMatrix& x, const PcaOptions& options) {
    auto out = pca_fit_transform(x.values, options);
    out.embedding.cell_ids = x.cell_ids;
    return out;
}

}
