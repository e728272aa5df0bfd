#include "scbench/study.hpp"

#include <stdexcept>

namespace scbench {

nlohmann::json options_json(const StudyOptions& o) {
    nlohmann::json j;
    j["sample"] = o.sample;
    j["cumulative"] = { { "n_permutations", o.cumulative.n_permutations }, { "seed", o.cumulative.seed } };
    j["filter"] = {
        { "zero_fraction_threshold", o.preprocess.filter.zero_fraction_threshold },
        { "cv_drop_fraction", o.preprocess.filter.cv_drop_fraction },
    };
    j["normalize_axis"] = o.preprocess.axis == NormalizeAxis::cells ? "cells" : "genes";
    j["log1p"] = o.preprocess.log1p;
    j["pca_components"] = o.pca_components;
    j["tsne"] = {
        { "enabled", o.run_tsne },
        { "perplexity", o.tsne.perplexity },
        { "dims", o.tsne.dims },
        { "iterations", o.tsne.iterations },
        { "learning_rate", o.tsne.learning_rate },
        { "exaggeration", o.tsne.exaggeration },
        { "exaggeration_iterations", o.tsne.exaggeration_iterations },
        { "pca_dims", o.tsne.pca_dims },
        { "init", o.tsne.init == TsneInit::pca ? "pca" : "random" },
        { "seed", o.tsne.seed },
    };
    j["cluster"] = {
        { "method", o.cluster_method == ClusterMethod::kmeans ? "kmeans" : "hclust" },
        { "k", o.k },
        { "metric", to_string(o.metric) },
        { "linkage", to_string(o.linkage) },
        { "restarts", o.restarts },
    };
    if (o.k_range) {
        j["cluster"]["k_range"] = { o.k_range->first, o.k_range->second };
    }
    j["seed"] = o.seed;
    return j;
}

ClusterResult cluster_points(const Eigen::MatrixXd& coordinates, std::size_t k, const StudyOptions& options) {
    k = std::min(k, static_cast<std::size_t>(coordinates.rows()));
    if (options.cluster_method == ClusterMethod::kmeans) {
        KmeansOptions km;
        km.k = k;
        km.seed = options.seed;
        km.restarts = options.restarts;
        return kmeans(coordinates, km).clusters;
    }
    auto tree = hierarchical(coordinates, options.metric, options.linkage);
    auto out = cut_dendrogram(tree, k);
    out.seed = options.seed;
    return out;
}

namespace {

std::optional<std::vector<std::size_t>> cell_type_codes(const std::vector<CellAnnotation>& cells) {
    std::vector<std::string> types;
    for (const auto& c : cells) {
        if (!c.cell_type) {
            return std::nullopt;
        }
        types.push_back(*c.cell_type);
    }
    return encode_labels(types);
}

EmbeddingRun cluster_embedding(Embedding embedding, const std::vector<CellAnnotation>& cells, const StudyOptions& options) {
    EmbeddingRun run;
    run.cluster_method = options.cluster_method == ClusterMethod::kmeans ? "kmeans" : "hclust";
    const auto& coords = embedding.coordinates;
    run.clusters = cluster_points(coords, options.k, options);

    // Silhouette needs >= 2 clusters and is only informative below n clusters.
    DistanceMatrix distances;
    bool have_distances = false;
    auto distances_for = [&]() -> const DistanceMatrix& {
        if (!have_distances) {
            distances = pairwise_distances(coords, options.metric);
            have_distances = true;
        }
        return distances;
    };
    if (run.clusters.k >= 2) {
        run.silhouette = silhouette(distances_for(), run.clusters.labels);
    }
    if (options.k_range) {
        std::size_t hi = std::min<std::size_t>(options.k_range->second, coords.rows());
        for (std::size_t k = std::max<std::size_t>(options.k_range->first, 2); k <= hi; ++k) {
            auto c = cluster_points(coords, k, options);
            run.sweep.push_back({ k, silhouette(distances_for(), c.labels).mean });
        }
    }
    if (auto truth = cell_type_codes(cells)) {
        run.ari_vs_cell_type = adjusted_rand_index(*truth, run.clusters.labels);
    }
    run.embedding = std::move(embedding);
    return run;
}

}

StudyResults run_study(const AnnotatedMatrix& data, const StudyOptions& options) {
    options.preprocess.filter.validate();
    if (options.k == 0) {
        throw std::invalid_argument("k must be positive");
    }
    if (options.k_range && (options.k_range->first > options.k_range->second || options.k_range->second < 2)) {
        throw std::invalid_argument("k range must satisfy lo <= hi and hi >= 2");
    }
    if (options.cluster_method == ClusterMethod::hclust && options.linkage == Linkage::ward && options.metric != Metric::euclidean) {
        throw std::invalid_argument("Ward linkage requires the euclidean metric");
    }

    StudyResults out;
    out.sample = options.sample;
    out.config = options_json(options);

    auto splits = split_by_method_replicate(data.matrix, data.cells);
    for (const auto& [key, split] : splits) {
        SplitResults r;
        r.key = key;
        r.cell_ids = split.matrix.cell_ids();
        r.n_genes = split.matrix.n_genes();
        r.dropout = dropout_rate(split.matrix);
        r.detection = detection_stats(split.matrix);
        r.cumulative = cumulative_detection(split.matrix, options.cumulative);

        try {
            if (split.matrix.n_cells() < 2) {
                throw DataError("fewer than two cells");
            }
            auto pre = preprocess_pipeline(split.matrix, options.preprocess);
            r.filter = pre.trace;

            std::size_t max_dims = std::min(pre.expression.n_cells(), pre.expression.n_genes());
            PcaOptions pca_opt;
            pca_opt.components = std::min(options.pca_components, max_dims);
            auto pca = pca_fit_transform(pre.expression, pca_opt);
            r.embeddings.push_back(cluster_embedding(std::move(pca.embedding), split.cells, options));

            if (options.run_tsne) {
                if (pre.expression.n_cells() < 4 || 3.0 * options.tsne.perplexity >= static_cast<double>(pre.expression.n_cells())) {
                    r.skipped = "t-SNE skipped: perplexity " + format_real(options.tsne.perplexity) + " infeasible for " + std::to_string(pre.expression.n_cells()) + " cells";
                } else {
                    auto t = tsne(pre.expression, options.tsne);
                    r.embeddings.push_back(cluster_embedding(std::move(t.embedding), split.cells, options));
                }
            }
        } catch (const DataError& e) {
            r.skipped = e.what();
        }
        out.splits.push_back(std::move(r));
    }
    return out;
}

}
