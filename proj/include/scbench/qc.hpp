#ifndef SCBENCH_QC_HPP
#define SCBENCH_QC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ingest.hpp"
#include "matrix.hpp"

/**
 * @file qc.hpp
 * @brief Protocol comparison metrics: dropout, genes detected per cell, cumulative gene detection.
 */

namespace scbench {

struct DropoutReport {
    /** Fraction of all cell-gene entries that are zero. */
    double overall_rate = 0;
    /** Fraction of cells with a zero count, per gene. */
    std::vector<double> per_gene_rate;
};

/** Computed from stored-entry counts only. Throws `DataError` if either dimension is zero. */
DropoutReport dropout_rate(const CountMatrix& m);

struct DetectionStats {
    /** Genes with a count of at least 1, per cell. */
    std::vector<std::size_t> per_cell_detected;
    double median = 0;
    double q1 = 0;
    double q3 = 0;
};

/** Quartiles use linear interpolation between closest ranks. Requires at least one cell. */
DetectionStats detection_stats(const CountMatrix& m);

struct CumulativeOptions {
    /**
     * Number of random cell orderings averaged into the curve.
     * If this is at least `n_cells!`, every ordering is enumerated exactly once instead.
     */
    std::size_t n_permutations = 20;
    std::uint64_t seed = 42;
};

struct CumulativeCurve {
    /** Number of cells added, 1 to `n_cells`. */
    std::vector<std::size_t> x;
    /** Mean number of distinct genes detected among the first `x` cells. */
    std::vector<double> y;
    std::size_t n_permutations = 0;
    std::uint64_t seed = 0;
};

/**
 * Running union of detected genes as cells are added in random order, averaged over orderings.
 * Ordering `p` is drawn from the sub-seed `derive_seed(seed, p)`.
 */
CumulativeCurve cumulative_detection(const CountMatrix& m, const CumulativeOptions& options = {});

struct SensitivityRow {
    std::string method;
    std::string replicate;
    std::size_t n_cells;
    double median_detected;
    double q1_detected;
    double q3_detected;
    double dropout;
};

/** One row per split, in split order. */
std::vector<SensitivityRow> method_sensitivity_table(const SplitMap& splits);

}

#endif
