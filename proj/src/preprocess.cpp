#include "scbench/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scbench/parallel.hpp"

namespace scbench {

void FilterConfig::validate() const {
    if (!(zero_fraction_threshold >= 0 && zero_fraction_threshold < 1)) {
        throw std::invalid_argument("zero_fraction_threshold must lie in [0, 1)");
    }
    if (!(cv_drop_fraction >= 0 && cv_drop_fraction < 1)) {
        throw std::invalid_argument("cv_drop_fraction must lie in [0, 1)");
    }
}

FilterResult filter_sparse_genes(const CountMatrix& m, const FilterConfig& cfg) {
    cfg.validate();
    if (m.n_cells() == 0) {
        throw DataError("sparsity filter needs at least one cell");
    }
    double n = static_cast<double>(m.n_cells());
    std::vector<bool> keep(m.n_genes());
    FilterResult out;
    out.trace.genes_in = m.n_genes();
    for (std::size_t g = 0; g < m.n_genes(); ++g) {
        double zero_fraction = static_cast<double>(m.n_cells() - m.nonzero_in_gene(g)) / n;
        keep[g] = !(zero_fraction > cfg.zero_fraction_threshold);
        if (!keep[g]) {
            out.trace.removed_sparse_ids.push_back(m.gene_ids()[g]);
        }
    }
    out.trace.removed_by_sparsity = out.trace.removed_sparse_ids.size();
    out.matrix = submatrix(m, std::vector<bool>(m.n_cells(), true), keep);
    out.trace.genes_out = out.matrix.n_genes();
    return out;
}

FilterResult filter_low_cv(const CountMatrix& m, const FilterConfig& cfg) {
    cfg.validate();
    FilterResult out;
    out.trace.genes_in = m.n_genes();
    // Slack absorbs products such as 0.15 * 20 landing just under an integer.
    auto n_remove = static_cast<std::size_t>(std::floor(cfg.cv_drop_fraction * static_cast<double>(m.n_genes()) + 1e-9));
    n_remove = std::min(n_remove, m.n_genes());
    if (n_remove == 0) {
        out.matrix = m;
        out.trace.genes_out = m.n_genes();
        return out;
    }

    auto stats = gene_stats(m);
    std::vector<std::size_t> order(m.n_genes());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return stats.cv[a] < stats.cv[b]; });

    std::vector<bool> keep(m.n_genes(), true);
    for (std::size_t i = 0; i < n_remove; ++i) {
        keep[order[i]] = false;
    }
    for (std::size_t g = 0; g < m.n_genes(); ++g) {
        if (!keep[g]) {
            out.trace.removed_cv_ids.push_back(m.gene_ids()[g]);
        }
    }
    out.trace.removed_by_cv = n_remove;
    out.matrix = submatrix(m, std::vector<bool>(m.n_cells(), true), keep);
    out.trace.genes_out = out.matrix.n_genes();
    return out;
}

namespace {

// Quantile-normalize the rows of `values` in place.
void normalize_rows(Eigen::MatrixXd& values) {
    const Eigen::Index n = values.rows(), len = values.cols();
    std::vector<std::vector<Eigen::Index>> ranks(static_cast<std::size_t>(n));
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            auto& idx = ranks[r];
            idx.resize(static_cast<std::size_t>(len));
            std::iota(idx.begin(), idx.end(), 0);
            auto row = static_cast<Eigen::Index>(r);
            std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) { return values(row, a) < values(row, b); });
        }
    });

    // Position means summed in distribution order.
    std::vector<double> reference(static_cast<std::size_t>(len), 0.0);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& idx = ranks[static_cast<std::size_t>(r)];
        for (Eigen::Index p = 0; p < len; ++p) {
            reference[static_cast<std::size_t>(p)] += values(r, idx[static_cast<std::size_t>(p)]);
        }
    }
    for (auto& v : reference) {
        v /= static_cast<double>(n);
    }

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            const auto& idx = ranks[r];
            auto row = static_cast<Eigen::Index>(r);
            std::size_t p = 0;
            const auto total = static_cast<std::size_t>(len);
            while (p < total) {
                std::size_t q = p + 1;
                double v = values(row, idx[p]);
                while (q < total && values(row, idx[q]) == v) {
                    ++q;
                }
                double assigned = reference[p];
                if (q - p > 1) {
                    double sum = 0;
                    for (std::size_t t = p; t < q; ++t) {
                        sum += reference[t];
                    }
                    assigned = sum / static_cast<double>(q - p);
                }
                for (std::size_t t = p; t < q; ++t) {
                    values(row, idx[t]) = assigned;
                }
                p = q;
            }
        }
    });
}

}

ExpressionMatrix quantile_normalize(const ExpressionMatrix& x, NormalizeAxis axis) {
    if (x.values.size() == 0) {
        throw DataError("quantile normalization of an empty matrix");
    }
    if (!x.values.allFinite()) {
        throw DataError("quantile normalization input contains non-finite values");
    }
    ExpressionMatrix out = x;
    if (axis == NormalizeAxis::cells) {
        if (out.values.rows() < 2) {
            throw DataError("quantile normalization needs at least two distributions");
        }
        normalize_rows(out.values);
    } else {
        if (out.values.cols() < 2) {
            throw DataError("quantile normalization needs at least two distributions");
        }
        Eigen::MatrixXd transposed = out.values.transpose();
        normalize_rows(transposed);
        out.values = transposed.transpose();
    }
    return out;
}

PreprocessResult preprocess_pipeline(const CountMatrix& m, const PreprocessOptions& options) {
    auto sparse = filter_sparse_genes(m, options.filter);
    if (sparse.matrix.n_genes() == 0) {
        throw DataError("no genes left after the sparsity filter");
    }
    auto low_cv = filter_low_cv(sparse.matrix, options.filter);
    if (low_cv.matrix.n_genes() == 0) {
        throw DataError("no genes left after the CV filter");
    }

    PreprocessResult out;
    out.trace.genes_in = m.n_genes();
    out.trace.removed_by_sparsity = sparse.trace.removed_by_sparsity;
    out.trace.removed_sparse_ids = std::move(sparse.trace.removed_sparse_ids);
    out.trace.removed_by_cv = low_cv.trace.removed_by_cv;
    out.trace.removed_cv_ids = std::move(low_cv.trace.removed_cv_ids);
    out.trace.genes_out = low_cv.matrix.n_genes();

    auto dense = to_dense(low_cv.matrix, options.dense_budget);
    if (options.log1p) {
        dense.values = dense.values.array().log1p().matrix();
    }
    out.expression = quantile_normalize(dense, options.axis);
    out.filtered = std::move(low_cv.matrix);
    return out;
}

}
