#ifndef SCBENCH_SYNTH_HPP
#define SCBENCH_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ingest.hpp"
#include "matrix.hpp"

/**
 * @file synth.hpp
 * @brief Seeded synthetic count matrices with known cluster structure.
 *
 * Counts follow a negative binomial (gamma-Poisson) model. Each cluster up-regulates its own block of marker genes
 * by `marker_fold`; every count is then independently zeroed with probability `dropout_prob`.
 */

namespace scbench {

struct SynthConfig {
    std::size_t n_clusters = 3;
    std::size_t cells_per_cluster = 100;
    std::size_t n_genes = 500;
    std::size_t n_marker_genes_per_cluster = 20;
    double base_mean = 2.0;
    double marker_fold = 6.0;
    double dropout_prob = 0.3;
    /** Negative binomial size parameter; the variance is `mean + mean^2 / dispersion`. */
    double dispersion = 2.0;
    std::uint64_t seed = 42;

    /** Annotation fields given to every generated cell. */
    std::string method = "synthetic";
    std::string replicate = "1";
    /** Prefix for cell ids, which are `<prefix><index>`. */
    std::string cell_prefix = "cell_";

    /** Throws `std::invalid_argument` for an unusable configuration. */
    void validate() const;
};

struct SynthData {
    CountMatrix matrix;
    std::vector<std::size_t> true_labels;
    std::vector<CellAnnotation> cells;
    std::vector<GeneAnnotation> genes;
};

/**
 * Cells are ordered by cluster. Genes `c * markers .. (c + 1) * markers - 1` are the markers of cluster `c`.
 * Cell annotations carry `cluster_<c>` as the cell type.
 */
SynthData generate(const SynthConfig& config);

/**
 * Stack several datasets that share a gene count into one aggregate (rows concatenated in order).
 * Cell ids must be distinct across the parts.
 */
SynthData concatenate(const std::vector<SynthData>& parts);

}

#endif
