#ifndef SCBENCH_PREPROCESS_HPP
#define SCBENCH_PREPROCESS_HPP

#include <string>
#include <vector>

#include "matrix.hpp"

/**
 * @file preprocess.hpp
 * @brief Gene filtering and quantile normalization ahead of embedding and clustering.
 */

namespace scbench {

struct FilterConfig {
    /** Genes whose fraction of zero counts is strictly greater than this are removed. */
    double zero_fraction_threshold = 0.8;

    /** Fraction of the remaining genes, with the lowest coefficient of variation, to remove. */
    double cv_drop_fraction = 0.15;

    /** Throws `std::invalid_argument` unless both fields lie in [0, 1). */
    void validate() const;
};

struct FilterTrace {
    std::size_t genes_in = 0;
    std::size_t removed_by_sparsity = 0;
    std::size_t removed_by_cv = 0;
    std::size_t genes_out = 0;
    std::vector<std::string> removed_sparse_ids;
    std::vector<std::string> removed_cv_ids;
};

struct FilterResult {
    CountMatrix matrix;
    FilterTrace trace;
};

/** Only `genes_in`, `removed_by_sparsity`, `removed_sparse_ids` and `genes_out` are filled in the trace. */
FilterResult filter_sparse_genes(const CountMatrix& m, const FilterConfig& cfg);

/**
 * Removes `floor(cv_drop_fraction * n_genes)` genes with the smallest coefficient of variation,
 * breaking ties by ascending gene index. Only the CV fields of the trace, `genes_in` and `genes_out` are filled.
 */
FilterResult filter_low_cv(const CountMatrix& m, const FilterConfig& cfg);

/** Which vectors of the cells-by-genes matrix are made to share one distribution. */
enum class NormalizeAxis {
    /** Each cell's profile across genes. */
    cells,
    /** Each gene's values across cells. */
    genes
};

/**
 * Classic quantile normalization.
 * Each distribution is sorted, the mean over distributions is taken at every sorted position,
 * and each value is replaced by the mean at its rank. Tied values receive the average of the position means they span.
 */
ExpressionMatrix quantile_normalize(const ExpressionMatrix& x, NormalizeAxis axis = NormalizeAxis::cells);

struct PreprocessOptions {
    FilterConfig filter;
    NormalizeAxis axis = NormalizeAxis::cells;
    /** Apply `log(1 + x)` after densifying and before normalization. */
    bool log1p = false;
    std::size_t dense_budget = default_dense_budget;
};

struct PreprocessResult {
    ExpressionMatrix expression;
    FilterTrace trace;
    CountMatrix filtered;
};

/**
 * Sparsity filter, then CV filter, then densify, then quantile normalize.
 * Throws `DataError` if no genes survive filtering.
 */
PreprocessResult preprocess_pipeline(const CountMatrix& m, const PreprocessOptions& options = {});

}

#endif
