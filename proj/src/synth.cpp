#include "scbench/synth.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "scbench/rng.hpp"

namespace scbench {

void SynthConfig::validate() const {
    if (n_clusters == 0 || cells_per_cluster == 0 || n_genes == 0) {
        throw std::invalid_argument("synthetic data needs at least one cluster, cell and gene");
    }
    if (n_marker_genes_per_cluster * n_clusters > n_genes) {
        throw std::invalid_argument("marker genes across all clusters exceed n_genes");
    }
    if (!(base_mean > 0) || !(marker_fold > 0) || !std::isfinite(base_mean) || !std::isfinite(marker_fold)) {
        throw std::invalid_argument("base_mean and marker_fold must be positive");
    }
    if (!(dropout_prob >= 0 && dropout_prob < 1)) {
        throw std::invalid_argument("dropout_prob must lie in [0, 1)");
    }
    if (!(dispersion > 0) || !std::isfinite(dispersion)) {
        throw std::invalid_argument("dispersion must be positive");
    }
    if (method.empty() || replicate.empty()) {
        throw std::invalid_argument("method and replicate must be non-empty");
    }
}

SynthData generate(const SynthConfig& config) {
    config.validate();
    const std::size_t n_cells = config.n_clusters * config.cells_per_cluster;
    Rng rng(config.seed);

    std::vector<Triplet> triplets;
    SynthData out;
    out.true_labels.reserve(n_cells);
    for (std::size_t c = 0; c < n_cells; ++c) {
        std::size_t cluster = c / config.cells_per_cluster;
        out.true_labels.push_back(cluster);
        std::size_t marker_begin = cluster * config.n_marker_genes_per_cluster;
        std::size_t marker_end = marker_begin + config.n_marker_genes_per_cluster;
        for (std::size_t g = 0; g < config.n_genes; ++g) {
            double mean = config.base_mean;
            if (g >= marker_begin && g < marker_end) {
                mean *= config.marker_fold;
            }
            double rate = rng.gamma(config.dispersion) * mean / config.dispersion;
            std::uint64_t count = rng.poisson(rate);
            bool dropped = rng.uniform() < config.dropout_prob;
            if (count > 0 && !dropped) {
                count = std::min<std::uint64_t>(count, std::numeric_limits<Count>::max());
                triplets.push_back({ static_cast<Index>(c), static_cast<Index>(g), count });
            }
        }
    }

    std::vector<std::string> cell_ids, gene_ids;
    for (std::size_t c = 0; c < n_cells; ++c) {
        cell_ids.push_back(config.cell_prefix + std::to_string(c));
        out.cells.push_back({ cell_ids.back(), config.method, config.replicate, "cluster_" + std::to_string(out.true_labels[c]) });
    }
    for (std::size_t g = 0; g < config.n_genes; ++g) {
        gene_ids.push_back("gene_" + std::to_string(g));
        out.genes.push_back({ gene_ids.back(), std::nullopt });
    }
    out.matrix = from_triplets(std::move(triplets), n_cells, config.n_genes, std::move(cell_ids), std::move(gene_ids));
    return out;
}

SynthData concatenate(const std::vector<SynthData>& parts) {
    if (parts.empty()) {
        throw std::invalid_argument("nothing to concatenate");
    }
    const std::size_t n_genes = parts.front().matrix.n_genes();
    SynthData out;
    out.genes = parts.front().genes;
    std::vector<Triplet> triplets;
    std::vector<std::string> cell_ids;
    std::size_t offset = 0;
    for (const auto& part : parts) {
        if (part.matrix.n_genes() != n_genes) {
            throw std::invalid_argument("parts have different gene counts");
        }
        for (auto t : part.matrix.triplets()) {
            t.cell += static_cast<Index>(offset);
            triplets.push_back(t);
        }
        cell_ids.insert(cell_ids.end(), part.matrix.cell_ids().begin(), part.matrix.cell_ids().end());
        out.cells.insert(out.cells.end(), part.cells.begin(), part.cells.end());
        out.true_labels.insert(out.true_labels.end(), part.true_labels.begin(), part.true_labels.end());
        offset += part.matrix.n_cells();
    }
    out.matrix = from_triplets(std::move(triplets), offset, n_genes, std::move(cell_ids), parts.front().matrix.gene_ids());
    return out;
}

}
