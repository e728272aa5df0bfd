#ifndef SCBENCH_REPORT_HPP
#define SCBENCH_REPORT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cluster.hpp"
#include "embedding.hpp"
#include "ingest.hpp"
#include "preprocess.hpp"
#include "qc.hpp"

/**
 * @file report.hpp
 * @brief Result containers for one study run and the CSV/JSON/SVG files written from them.
 *
 * Table schemas (all comma-separated, one header line, rows in (method, replicate) order):
 *
 * | file | header |
 * |------|--------|
 * | `dimensions.csv` | `sample,method,replicate,n_cells,n_genes,n_genes_after_filter` |
 * | `dropout.csv` | `sample,method,replicate,overall_dropout,median_genes_detected` |
 * | `detection.csv` | `sample,method,replicate,cell_id,genes_detected` |
 * | `cumulative.csv` | `sample,method,replicate,n_cells,mean_genes_detected` |
 * | `embedding_<pca/tsne>.csv` | `sample,method,replicate,cell_id,dim1,...,dimD` |
 * | `clusters.csv` | `sample,method,replicate,embedding,cluster_method,k,cell_id,label,silhouette` |
 * | `silhouette.csv` | `sample,method,replicate,embedding,cluster_method,k,mean_silhouette` |
 *
 * Reals are written with 17 significant digits so they parse back exactly.
 */

namespace scbench {

/** `%.17g`, the shortest format that always round-trips a double. */
std::string format_real(double v);

struct SilhouettePoint {
    std::size_t k;
    double mean;
};

/** Clustering of one embedding of one split. */
struct EmbeddingRun {
    Embedding embedding;
    std::string cluster_method;
    ClusterResult clusters;
    std::optional<SilhouetteReport> silhouette;
    /** Mean silhouette across the requested k range. */
    std::vector<SilhouettePoint> sweep;
    /** Agreement with annotated cell types, when every cell has one. */
    std::optional<double> ari_vs_cell_type;
};

struct SplitResults {
    SplitKey key;
    std::vector<std::string> cell_ids;
    std::size_t n_genes = 0;
    DropoutReport dropout;
    DetectionStats detection;
    CumulativeCurve cumulative;
    std::optional<FilterTrace> filter;
    std::vector<EmbeddingRun> embeddings;
    /** Why embedding or clustering was not run for this split. */
    std::optional<std::string> skipped;
};

struct StudyResults {
    std::string sample;
    std::vector<SplitResults> splits;
    /** Fully resolved run configuration, embedded in every non-tabular output. */
    nlohmann::json config;
};

/**
 * Write every table listed above plus `summary.json`. Embedding tables are written for each method present
 * in any split, header-only when no split produced it. Returns the paths written, in a fixed order.
 */
std::vector<std::filesystem::path> emit_tables(const StudyResults& results, const std::filesystem::path& dir);

/**
 * Write `dropout.svg`, `detection.svg`, `cumulative.svg`, `silhouette.svg` and one `embedding_<method>.svg`
 * per embedding method. Jitter in the detection plot is drawn from `seed`.
 * Throws `std::invalid_argument` if an embedding has no cluster labels.
 */
std::vector<std::filesystem::path> emit_plots(const StudyResults& results, const std::filesystem::path& dir, std::uint64_t seed);

SplitSummary summary_from_results(const StudyResults& results);

void write_dimensions_csv(const SplitSummary& summary, const std::filesystem::path& path);

nlohmann::json summary_json(const StudyResults& results);

/** Parsed CSV file: header plus rows of raw fields. */
struct CsvRows {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvRows read_csv_rows(const std::filesystem::path& path);

/** Write `text` to `path`, throwing `std::runtime_error` on I/O failure. */
void write_text(const std::filesystem::path& path, const std::string& text);

}

#endif
