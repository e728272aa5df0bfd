#ifndef SCBENCH_MATRIX_HPP
#define SCBENCH_MATRIX_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

/**
 * @file matrix.hpp
 * @brief Sparse count storage and the per-gene statistics that downstream steps consume.
 */

namespace scbench {

using Count = std::uint32_t;
using Index = std::uint32_t;

/**
 * Raised whenever input data violates a documented precondition.
 * The CLI maps this to exit code 1.
 */
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Triplet {
    Index cell;
    Index gene;
    std::uint64_t count;
};

/**
 * Cell-major (CSR) copy of a `CountMatrix`, built on demand for per-cell traversals.
 */
struct CellMajorView {
    std::vector<std::size_t> offsets;
    std::vector<Index> genes;
    std::vector<Count> counts;

    std::span<const Index> genes_of(std::size_t cell) const {
        return { genes.data() + offsets[cell], offsets[cell + 1] - offsets[cell] };
    }
    std::span<const Count> counts_of(std::size_t cell) const {
        return { counts.data() + offsets[cell], offsets[cell + 1] - offsets[cell] };
    }
};

/**
 * @brief Immutable cells-by-genes matrix of non-negative integer counts.
 *
 * Only non-zero counts are stored, in gene-major order (all cells of gene 0 in ascending cell order, then gene 1, ...),
 * so every reduction over the entries visits them in the same order.
 */
class CountMatrix {
public:
    CountMatrix() = default;

    std::size_t n_cells() const { return cell_ids_.size(); }
    std::size_t n_genes() const { return gene_ids_.size(); }
    std::size_t nnz() const { return counts_.size(); }

    const std::vector<std::string>& cell_ids() const { return cell_ids_; }
    const std::vector<std::string>& gene_ids() const { return gene_ids_; }

    std::span<const Index> cells_of(std::size_t gene) const {
        return { cells_.data() + offsets_[gene], offsets_[gene + 1] - offsets_[gene] };
    }
    std::span<const Count> counts_of(std::size_t gene) const {
        return { counts_.data() + offsets_[gene], offsets_[gene + 1] - offsets_[gene] };
    }
    std::size_t nonzero_in_gene(std::size_t gene) const { return offsets_[gene + 1] - offsets_[gene]; }

    /** Count at `(cell, gene)`, zero if not stored. Binary search within the gene. */
    Count at(std::size_t cell, std::size_t gene) const;

    /** All stored entries in canonical order. */
    std::vector<Triplet> triplets() const;

    CellMajorView by_cell() const;

    /** Copy with new identifiers; lengths must match and ids must be unique. */
    CountMatrix with_ids(std::vector<std::string> cell_ids, std::vector<std::string> gene_ids) const;

    friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

private:
    friend CountMatrix from_triplets(std::vector<Triplet>, std::size_t, std::size_t, std::vector<std::string>, std::vector<std::string>);
    friend CountMatrix submatrix(const CountMatrix&, const std::vector<bool>&, const std::vector<bool>&);

    std::vector<std::size_t> offsets_ = { 0 };
    std::vector<Index> cells_;
    std::vector<Count> counts_;
    std::vector<std::string> cell_ids_;
    std::vector<std::string> gene_ids_;
};

/**
 * Build a `CountMatrix` from unordered triplets. Zero counts are dropped.
 * Empty id lists are replaced by generated ids (`cell_<i>`, `gene_<j>`).
 * Throws `DataError` on an out-of-range index, a duplicated `(cell, gene)` pair, a count above 2^32 - 1,
 * or id lists whose lengths disagree with the dimensions.
 */
CountMatrix from_triplets(
    std::vector<Triplet> triplets,
    std::size_t n_cells,
    std::size_t n_genes,
    std::vector<std::string> cell_ids = {},
    std::vector<std::string> gene_ids = {}
);

/**
 * Keep the cells and genes whose mask entry is true, preserving order and ids.
 */
CountMatrix submatrix(const CountMatrix& m, const std::vector<bool>& cell_mask, const std::vector<bool>& gene_mask);

/** Fraction of cells with a non-zero count, per gene. Requires at least one cell. */
std::vector<double> gene_nonzero_fraction(const CountMatrix& m);

struct GeneStats {
    std::vector<std::size_t> nonzero_cell_count;
    std::vector<double> mean;
    /** Population standard deviation over all cells, zeros included. */
    std::vector<double> standard_deviation;
    /** `standard_deviation / mean`, defined as 0 for all-zero genes. */
    std::vector<double> cv;
};

/** Requires at least two cells. */
GeneStats gene_stats(const CountMatrix& m);

/**
 * @brief Dense real-valued cells-by-genes matrix.
 */
struct ExpressionMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> cell_ids;
    std::vector<std::string> gene_ids;

    std::size_t n_cells() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_genes() const { return static_cast<std::size_t>(values.cols()); }
};

/** Largest number of values `to_dense()` will allocate unless told otherwise. */
inline constexpr std::size_t default_dense_budget = 500'000'000;

ExpressionMatrix to_dense(const CountMatrix& m, std::size_t budget = default_dense_budget);

/** Inverse of `to_dense()`; every value must be a non-negative integer. */
CountMatrix from_dense(const ExpressionMatrix& x);

}

#endif
