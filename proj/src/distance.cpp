#include "scbench/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scbench/matrix.hpp"
#include "scbench/parallel.hpp"

namespace scbench {

const char* to_string(Metric m) {
    return m == Metric::euclidean ? "euclidean" : "one-minus-correlation";
}

Metric parse_metric(const std::string& name) {
    if (name == "euclidean") {
        return Metric::euclidean;
    }
    if (name == "one-minus-correlation" || name == "one_minus_correlation" || name == "correlation") {
        return Metric::one_minus_correlation;
    }
    throw std::invalid_argument("unknown metric '" + name + "'");
}

DistanceMatrix pairwise_distances(const Eigen::MatrixXd& x, Metric metric) {
    const auto n = static_cast<std::size_t>(x.rows());
    if (n < 2) {
        throw DataError("pairwise distances need at least two rows");
    }
    if (!x.allFinite()) {
        throw DataError("distance input contains non-finite values");
    }

    // Row-major copy so each row is contiguous.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = x;
    if (metric == Metric::one_minus_correlation) {
        for (Eigen::Index i = 0; i < rows.rows(); ++i) {
            rows.row(i).array() -= rows.row(i).mean();
            double norm = rows.row(i).norm();
            if (!(norm > 0)) {
                throw DataError("row " + std::to_string(i) + " has zero variance; correlation distance is undefined");
            }
            rows.row(i) /= norm;
        }
    }

    DistanceMatrix out(n);
    parallel_for(n - 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double* tail = out.row_tail(i);
            const auto ri = rows.row(static_cast<Eigen::Index>(i));
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto rj = rows.row(static_cast<Eigen::Index>(j));
                double value;
                if (metric == Metric::euclidean) {
                    value = std::sqrt((ri - rj).squaredNorm());
                } else {
                    double r = std::clamp(ri.dot(rj), -1.0, 1.0);
                    value = 1.0 - r;
                }
                tail[j - i - 1] = value;
            }
        }
    });
    return out;
}

DistanceMatrix distance_matrix_from_square(const Eigen::MatrixXd& square) {
    if (square.rows() != square.cols()) {
        throw DataError("distance table is not square");
    }
    const auto n = static_cast<std::size_t>(square.rows());
    DistanceMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto ii = static_cast<Eigen::Index>(i);
        if (square(ii, ii) != 0) {
            throw DataError("distance table has a non-zero diagonal");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            auto jj = static_cast<Eigen::Index>(j);
            double v = square(ii, jj);
            if (!std::isfinite(v) || v < 0) {
                throw DataError("distance table has a negative or non-finite entry");
            }
            if (v != square(jj, ii)) {
                throw DataError("distance table is not symmetric");
            }
            out.set(i, j, v);
        }
    }
    return out;
}

}
