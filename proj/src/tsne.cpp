#include "scbench/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "scbench/parallel.hpp"
#include "scbench/pca.hpp"
#include "scbench/rng.hpp"

namespace scbench {

namespace {

std::string format_real(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

// Fills row `i` of `out` with exp(-beta * (d - d_min)) normalized, returning the perplexity.
double conditional_row(const SquareTable& dist, std::size_t i, double beta, double d_min, double* out) {
    const std::size_t n = dist.n;
    double sum = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
            out[j] = 0;
            continue;
        }
        out[j] = std::exp(-beta * (dist(i, j) - d_min));
        sum += out[j];
    }
    double weighted = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j != i) {
            out[j] /= sum;
            weighted += out[j] * (dist(i, j) - d_min);
        }
    }
    double entropy = std::log(sum) + beta * weighted;
    return std::exp(entropy);
}

}

SquareTable squared_euclidean_distances(const Eigen::MatrixXd& x) {
    const auto n = static_cast<std::size_t>(x.rows());
    SquareTable out{ n, std::vector<double>(n * n, 0.0) };
    Eigen::MatrixXd rows = x;
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    out(i, j) = (rows.row(static_cast<Eigen::Index>(i)) - rows.row(static_cast<Eigen::Index>(j))).squaredNorm();
                }
            }
        }
    });
    return out;
}

Calibration calibrate_affinities(const SquareTable& dist, double perplexity, double tolerance) {
    const std::size_t n = dist.n;
    Calibration out;
    out.conditional = SquareTable{ n, std::vector<double>(n * n, 0.0) };
    out.beta.assign(n, 1.0);
    out.achieved_perplexity.assign(n, 0.0);
    std::vector<char> failed(n, 0);

    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double* row = out.conditional.values.data() + i * n;
            double d_min = std::numeric_limits<double>::infinity();
            double d_sum = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    d_min = std::min(d_min, dist(i, j));
                    d_sum += dist(i, j);
                }
            }
            double spread = d_sum / static_cast<double>(n - 1) - d_min;
            double beta = spread > 0 ? 1.0 / spread : 1.0;

            // Perplexity falls as beta grows: bracket the target, then bisect.
            double lo = 0, hi = std::numeric_limits<double>::infinity();
            auto converged = [&](double p) { return std::abs(p - perplexity) < tolerance; };
            auto update = [&](double b, double p) {
                if (p > perplexity) {
                    lo = std::max(lo, b);
                } else {
                    hi = std::min(hi, b);
                }
            };
            double perp = conditional_row(dist, i, beta, d_min, row);
            update(beta, perp);
            for (int step = 0; step < 200 && !converged(perp) && !(lo > 0 && std::isfinite(hi)); ++step) {
                beta = std::isfinite(hi) ? beta / 2 : beta * 2;
                perp = conditional_row(dist, i, beta, d_min, row);
                update(beta, perp);
            }
            for (int step = 0; step < 50 && !converged(perp) && lo > 0 && std::isfinite(hi); ++step) {
                beta = 0.5 * (lo + hi);
                perp = conditional_row(dist, i, beta, d_min, row);
                update(beta, perp);
            }
            out.beta[i] = beta;
            out.achieved_perplexity[i] = perp;
            failed[i] = std::abs(perp - perplexity) >= tolerance;
        }
    });
    out.unconverged = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
    return out;
}

SquareTable joint_probabilities(const SquareTable& conditional) {
    const std::size_t n = conditional.n;
    SquareTable out{ n, std::vector<double>(n * n, 0.0) };
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out(i, j) = (conditional(i, j) + conditional(j, i)) * scale;
        }
    }
    return out;
}

namespace {

// Sum over all off-diagonal pairs of 1 / (1 + |y_i - y_j|^2), reduced row by row in index order.
double kernel_sum(const Eigen::MatrixXd& y, std::vector<double>& row_sums) {
    const auto n = static_cast<std::size_t>(y.rows());
    row_sums.assign(n, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    double d = (y.row(static_cast<Eigen::Index>(i)) - y.row(static_cast<Eigen::Index>(j))).squaredNorm();
                    s += 1.0 / (1.0 + d);
                }
            }
            row_sums[i] = s;
        }
    });
    double total = 0;
    for (double s : row_sums) {
        total += s;
    }
    return total;
}

double kl_unchecked(const SquareTable& p, const Eigen::MatrixXd& y, std::vector<double>& scratch) {
    const std::size_t n = p.n;
    double z = kernel_sum(y, scratch);
    std::vector<double> row_kl(n, 0.0);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) {
                double pij = p(i, j);
                if (j == i || pij <= 0) {
                    continue;
                }
                double d = (y.row(static_cast<Eigen::Index>(i)) - y.row(static_cast<Eigen::Index>(j))).squaredNorm();
                double q = 1.0 / ((1.0 + d) * z);
                s += pij * std::log(pij / q);
            }
            row_kl[i] = s;
        }
    });
    double total = 0;
    for (double s : row_kl) {
        total += s;
    }
    return total;
}

}

double kl_divergence(const SquareTable& p, const Eigen::MatrixXd& coordinates) {
    if (p.n != static_cast<std::size_t>(coordinates.rows()) || p.values.size() != p.n * p.n) {
        throw DataError("probability table does not match the embedding");
    }
    if (p.n < 2) {
        throw DataError("KL divergence needs at least two points");
    }
    double sum = 0;
    for (std::size_t i = 0; i < p.n; ++i) {
        for (std::size_t j = 0; j < p.n; ++j) {
            double v = p(i, j);
            if (!(v >= 0) || !std::isfinite(v) || (i == j && v != 0)) {
                throw DataError("probability table has negative, non-finite or diagonal entries");
            }
            sum += v;
        }
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DataError("probability table does not sum to 1");
    }
    std::vector<double> scratch;
    return kl_unchecked(p, coordinates, scratch);
}

TsneResult tsne(const Eigen::MatrixXd& input, const TsneOptions& options) {
    const auto n = static_cast<std::size_t>(input.rows());
    if (n < 4) {
        throw std::invalid_argument("t-SNE needs at least four cells");
    }
    if (!(options.perplexity > 0) || 3.0 * options.perplexity >= static_cast<double>(n)) {
        throw std::invalid_argument("perplexity " + format_real(options.perplexity) + " is infeasible for " + std::to_string(n) + " cells (need 3 * perplexity < n)");
    }
    if (options.dims == 0) {
        throw std::invalid_argument("t-SNE output dimension must be positive");
    }
    if (!input.allFinite()) {
        throw DataError("t-SNE input contains non-finite values");
    }

    Eigen::MatrixXd x = input;
    bool reduced = false;
    if (options.pca_dims > 0 && static_cast<std::size_t>(x.cols()) > options.pca_dims) {
        PcaOptions pca_opt;
        pca_opt.components = std::min<std::size_t>(options.pca_dims, n);
        x = pca_fit_transform(x, pca_opt).embedding.coordinates;
        reduced = true;
    }

    TsneResult out;
    auto dist = squared_euclidean_distances(x);
    out.calibration = calibrate_affinities(dist, options.perplexity);
    dist = SquareTable{};
    out.joint = joint_probabilities(out.calibration.conditional);

    const auto d = static_cast<Eigen::Index>(options.dims);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(n), d);
    if (options.init == TsneInit::pca && static_cast<Eigen::Index>(options.dims) <= std::min<Eigen::Index>(x.cols(), x.rows())) {
        PcaOptions pca_opt;
        pca_opt.components = options.dims;
        y = pca_fit_transform(x, pca_opt).embedding.coordinates;
        double sd = std::sqrt((y.col(0).array() - y.col(0).mean()).square().sum() / static_cast<double>(n - 1));
        if (sd > 0) {
            y *= options.init_scale / sd;
        } else {
            y.setZero();
        }
    } else {
        Rng rng(options.seed);
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            for (Eigen::Index k = 0; k < d; ++k) {
                y(i, k) = rng.normal() * options.init_scale;
            }
        }
    }

    Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(y.rows(), d);
    Eigen::MatrixXd gains = Eigen::MatrixXd::Ones(y.rows(), d);
    Eigen::MatrixXd grad(y.rows(), d);
    std::vector<double> row_sums;
    const SquareTable& p = out.joint;

    for (std::size_t iter = 0; iter < options.iterations; ++iter) {
        double exaggeration = iter < options.exaggeration_iterations ? options.exaggeration : 1.0;
        double momentum = iter < options.momentum_switch ? options.initial_momentum : options.final_momentum;

        double z = kernel_sum(y, row_sums);
        parallel_for(n, [&](std::size_t begin, std::size_t end) {
            Eigen::RowVectorXd diff(d);
            for (std::size_t i = begin; i < end; ++i) {
                Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(d);
                const auto ii = static_cast<Eigen::Index>(i);
                for (std::size_t j = 0; j < n; ++j) {
                    if (j == i) {
                        continue;
                    }
                    diff = y.row(ii) - y.row(static_cast<Eigen::Index>(j));
                    double kernel = 1.0 / (1.0 + diff.squaredNorm());
                    g += ((exaggeration * p(i, j) - kernel / z) * kernel) * diff;
                }
                grad.row(ii) = 4.0 * g;
            }
        });

        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            for (Eigen::Index k = 0; k < d; ++k) {
                bool same_sign = (grad(i, k) > 0) == (velocity(i, k) > 0);
                gains(i, k) = same_sign ? gains(i, k) * 0.8 : gains(i, k) + 0.2;
                gains(i, k) = std::max(gains(i, k), 0.01);
                velocity(i, k) = momentum * velocity(i, k) - options.learning_rate * gains(i, k) * grad(i, k);
                y(i, k) += velocity(i, k);
            }
        }
        y.rowwise() -= y.colwise().mean();

        if (options.track_kl) {
            out.kl_trace.push_back(kl_unchecked(p, y, row_sums));
        }
    }

    out.embedding.coordinates = std::move(y);
    out.embedding.method = EmbeddingMethod::tsne;
    out.embedding.seed = options.seed;
    out.embedding.params = {
        { "perplexity", format_real(options.perplexity) },
        { "dims", std::to_string(options.dims) },
        { "iterations", std::to_string(options.iterations) },
        { "learning_rate", format_real(options.learning_rate) },
        { "exaggeration", format_real(options.exaggeration) },
        { "exaggeration_iterations", std::to_string(options.exaggeration_iterations) },
        { "initial_momentum", format_real(options.initial_momentum) },
        { "final_momentum", format_real(options.final_momentum) },
        { "momentum_switch", std::to_string(options.momentum_switch) },
        { "init", options.init == TsneInit::pca ? "pca" : "random" },
        { "init_scale", format_real(options.init_scale) },
        { "pca_dims", reduced ? std::to_string(x.cols()) : "0" },
        { "gains", "delta-bar-delta(+0.2,*0.8,min 0.01)" },
    };
    return out;
}

TsneResult tsne(const ExpressionMatrix& x, const TsneOptions& options) {
    auto out = tsne(x.values, options);
    out.embedding.cell_ids = x.cell_ids;
    return out;
}

}
