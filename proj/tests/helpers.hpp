#ifndef SCBENCH_TESTS_HELPERS_HPP
#define SCBENCH_TESTS_HELPERS_HPP

#include <Eigen/Dense>

#include "oracles.hpp"
#include "scbench/matrix.hpp"

namespace testing {

inline scbench::CountMatrix to_matrix(const oracle::DenseCounts& counts, std::size_t n_genes) {
    std::vector<scbench::Triplet> t;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t g = 0; g < n_genes; ++g) {
            if (counts[c][g] != 0) {
                t.push_back({ static_cast<scbench::Index>(c), static_cast<scbench::Index>(g), counts[c][g] });
            }
        }
    }
    return scbench::from_triplets(std::move(t), counts.size(), n_genes);
}

inline Eigen::MatrixXd to_eigen(const oracle::Dense& x) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(x[0].size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < x[i].size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
        }
    }
    return out;
}

inline oracle::Dense to_rows(const Eigen::MatrixXd& x) {
    oracle::Dense out(static_cast<std::size_t>(x.rows()), std::vector<double>(static_cast<std::size_t>(x.cols())));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = x(i, j);
        }
    }
    return out;
}

}

#endif
