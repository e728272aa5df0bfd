#ifndef SCBENCH_STUDY_HPP
#define SCBENCH_STUDY_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "cluster.hpp"
#include "ingest.hpp"
#include "pca.hpp"
#include "preprocess.hpp"
#include "qc.hpp"
#include "report.hpp"
#include "tsne.hpp"

/**
 * @file study.hpp
 * @brief The full protocol comparison for one aggregate matrix: split, QC, filter, normalize, embed, cluster, validate.
 */

namespace scbench {

enum class ClusterMethod {
    kmeans,
    hclust
};

struct StudyOptions {
    std::string sample = "sample";
    CumulativeOptions cumulative;
    PreprocessOptions preprocess;

    /** Dimensions of the PCA embedding that is clustered and plotted. */
    std::size_t pca_components = 2;
    bool run_tsne = true;
    TsneOptions tsne;

    ClusterMethod cluster_method = ClusterMethod::kmeans;
    std::size_t k = 9;
    /** Optional inclusive k range for the silhouette sweep. */
    std::optional<std::pair<std::size_t, std::size_t>> k_range;
    Metric metric = Metric::euclidean;
    Linkage linkage = Linkage::ward;
    std::size_t restarts = 10;
    std::uint64_t seed = 42;
};

/** Fully resolved options as JSON, for provenance in outputs. */
nlohmann::json options_json(const StudyOptions& options);

/**
 * Cluster `coordinates` into `k` groups with the configured method; k is capped at the number of cells.
 */
ClusterResult cluster_points(const Eigen::MatrixXd& coordinates, std::size_t k, const StudyOptions& options);

/**
 * Run every stage on each (method, replicate) split of `data`.
 * A split whose preprocessing or embedding is impossible (no genes left, too few cells) keeps its QC results
 * and records the reason in `skipped`.
 */
StudyResults run_study(const AnnotatedMatrix& data, const StudyOptions& options);

}

#endif
