#include "scbench/report.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "scbench/svg.hpp"

namespace scbench {

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

namespace {

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            out_ << (i ? "," : "") << csv_escape(fields[i]);
        }
        out_ << '\n';
    }

    void save(const std::filesystem::path& path, std::vector<std::filesystem::path>& written) const {
        write_text(path, out_.str());
        written.push_back(path);
    }

private:
    std::ostringstream out_;
};

std::vector<std::string> key_fields(const std::string& sample, const SplitKey& key) {
    return { sample, key.method, key.replicate };
}

std::string split_label(const SplitKey& key) {
    return key.method + " " + key.replicate;
}

std::set<EmbeddingMethod> embedding_methods(const StudyResults& results) {
    std::set<EmbeddingMethod> out;
    for (const auto& s : results.splits) {
        for (const auto& e : s.embeddings) {
            out.insert(e.embedding.method);
        }
    }
    return out;
}

const EmbeddingRun* find_run(const SplitResults& split, EmbeddingMethod method) {
    for (const auto& e : split.embeddings) {
        if (e.embedding.method == method) {
            return &e;
        }
    }
    return nullptr;
}

}

SplitSummary summary_from_results(const StudyResults& results) {
    SplitSummary summary;
    for (const auto& s : results.splits) {
        SplitSummaryRow row{ results.sample, s.key.method, s.key.replicate, s.cell_ids.size(), s.n_genes, std::nullopt };
        if (s.filter) {
            row.n_genes_after_filter = s.filter->genes_out;
        }
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

void write_dimensions_csv(const SplitSummary& summary, const std::filesystem::path& path) {
    CsvWriter csv({ "sample", "method", "replicate", "n_cells", "n_genes", "n_genes_after_filter" });
    for (const auto& r : summary.rows) {
        csv.row({ r.sample, r.method, r.replicate, std::to_string(r.n_cells), std::to_string(r.n_genes),
                  r.n_genes_after_filter ? std::to_string(*r.n_genes_after_filter) : "" });
    }
    std::vector<std::filesystem::path> ignored;
    csv.save(path, ignored);
}

nlohmann::json summary_json(const StudyResults& results) {
    nlohmann::json j;
    j["sample"] = results.sample;
    j["config"] = results.config;
    j["splits"] = nlohmann::json::array();
    for (const auto& s : results.splits) {
        nlohmann::json js;
        js["method"] = s.key.method;
        js["replicate"] = s.key.replicate;
        js["n_cells"] = s.cell_ids.size();
        js["n_genes"] = s.n_genes;
        js["overall_dropout"] = s.dropout.overall_rate;
        js["genes_detected"] = { { "q1", s.detection.q1 }, { "median", s.detection.median }, { "q3", s.detection.q3 } };
        js["cumulative_genes_detected"] = s.cumulative.y.empty() ? 0.0 : s.cumulative.y.back();
        js["cumulative_permutations"] = s.cumulative.n_permutations;
        if (s.filter) {
            js["filter"] = {
                { "genes_in", s.filter->genes_in },
                { "removed_by_sparsity", s.filter->removed_by_sparsity },
                { "removed_by_cv", s.filter->removed_by_cv },
                { "genes_out", s.filter->genes_out },
            };
        }
        if (s.skipped) {
            js["skipped"] = *s.skipped;
        }
        js["embeddings"] = nlohmann::json::array();
        for (const auto& e : s.embeddings) {
            nlohmann::json je;
            je["method"] = to_string(e.embedding.method);
            je["params"] = e.embedding.params;
            je["seed"] = e.embedding.seed;
            je["cluster_method"] = e.cluster_method;
            je["k"] = e.clusters.k;
            if (e.clusters.objective) {
                je["objective"] = *e.clusters.objective;
            }
            if (e.silhouette) {
                je["mean_silhouette"] = e.silhouette->mean;
            }
            if (e.ari_vs_cell_type) {
                je["ari_vs_cell_type"] = *e.ari_vs_cell_type;
            }
            js["embeddings"].push_back(std::move(je));
        }
        j["splits"].push_back(std::move(js));
    }
    return j;
}

std::vector<std::filesystem::path> emit_tables(const StudyResults& results, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;

    write_dimensions_csv(summary_from_results(results), dir / "dimensions.csv");
    written.push_back(dir / "dimensions.csv");

    CsvWriter dropout({ "sample", "method", "replicate", "overall_dropout", "median_genes_detected" });
    CsvWriter detection({ "sample", "method", "replicate", "cell_id", "genes_detected" });
    CsvWriter cumulative({ "sample", "method", "replicate", "n_cells", "mean_genes_detected" });
    for (const auto& s : results.splits) {
        auto key = key_fields(results.sample, s.key);
        auto row = key;
        row.push_back(format_real(s.dropout.overall_rate));
        row.push_back(format_real(s.detection.median));
        dropout.row(row);
        for (std::size_t c = 0; c < s.detection.per_cell_detected.size(); ++c) {
            row = key;
            row.push_back(c < s.cell_ids.size() ? s.cell_ids[c] : std::to_string(c));
            row.push_back(std::to_string(s.detection.per_cell_detected[c]));
            detection.row(row);
        }
        for (std::size_t x = 0; x < s.cumulative.x.size(); ++x) {
            row = key;
            row.push_back(std::to_string(s.cumulative.x[x]));
            row.push_back(format_real(s.cumulative.y[x]));
            cumulative.row(row);
        }
    }
    dropout.save(dir / "dropout.csv", written);
    detection.save(dir / "detection.csv", written);
    cumulative.save(dir / "cumulative.csv", written);

    std::set<EmbeddingMethod> methods = embedding_methods(results);
    methods.insert(EmbeddingMethod::pca);
    methods.insert(EmbeddingMethod::tsne);
    for (auto method : methods) {
        std::size_t dims = 0;
        for (const auto& s : results.splits) {
            if (auto run = find_run(s, method)) {
                dims = std::max(dims, run->embedding.dims());
            }
        }
        std::vector<std::string> header = { "sample", "method", "replicate", "cell_id" };
        for (std::size_t d = 0; d < dims; ++d) {
            header.push_back("dim" + std::to_string(d + 1));
        }
        CsvWriter csv(header);
        for (const auto& s : results.splits) {
            auto run = find_run(s, method);
            if (!run) {
                continue;
            }
            const auto& coords = run->embedding.coordinates;
            for (Eigen::Index i = 0; i < coords.rows(); ++i) {
                auto row = key_fields(results.sample, s.key);
                row.push_back(static_cast<std::size_t>(i) < s.cell_ids.size() ? s.cell_ids[static_cast<std::size_t>(i)] : std::to_string(i));
                for (std::size_t d = 0; d < dims; ++d) {
                    row.push_back(static_cast<Eigen::Index>(d) < coords.cols() ? format_real(coords(i, static_cast<Eigen::Index>(d))) : "");
                }
                csv.row(row);
            }
        }
        csv.save(dir / ("embedding_" + std::string(to_string(method)) + ".csv"), written);
    }

    CsvWriter clusters({ "sample", "method", "replicate", "embedding", "cluster_method", "k", "cell_id", "label", "silhouette" });
    CsvWriter sil({ "sample", "method", "replicate", "embedding", "cluster_method", "k", "mean_silhouette" });
    for (const auto& s : results.splits) {
        for (const auto& e : s.embeddings) {
            auto key = key_fields(results.sample, s.key);
            key.push_back(to_string(e.embedding.method));
            key.push_back(e.cluster_method);
            for (std::size_t i = 0; i < e.clusters.labels.size(); ++i) {
                auto row = key;
                row.push_back(std::to_string(e.clusters.k));
                row.push_back(i < s.cell_ids.size() ? s.cell_ids[i] : std::to_string(i));
                row.push_back(std::to_string(e.clusters.labels[i]));
                row.push_back(e.silhouette ? format_real(e.silhouette->per_point[i]) : "");
                clusters.row(row);
            }
            std::vector<SilhouettePoint> points = e.sweep;
            if (points.empty() && e.silhouette) {
                points.push_back({ e.clusters.k, e.silhouette->mean });
            }
            for (const auto& p : points) {
                auto row = key;
                row.push_back(std::to_string(p.k));
                row.push_back(format_real(p.mean));
                sil.row(row);
            }
        }
    }
    clusters.save(dir / "clusters.csv", written);
    sil.save(dir / "silhouette.csv", written);

    write_text(dir / "summary.json", summary_json(results).dump(2) + "\n");
    written.push_back(dir / "summary.json");
    return written;
}

std::vector<std::filesystem::path> emit_plots(const StudyResults& results, const std::filesystem::path& dir, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const std::string metadata = results.config.is_null() ? "" : results.config.dump();
    auto save = [&](const std::string& name, const std::string& doc) {
        write_text(dir / name, svg::with_metadata(doc, metadata));
        written.push_back(dir / name);
    };

    std::vector<svg::Bar> dropout_bars;
    std::vector<svg::BoxSeries> boxes;
    std::vector<svg::LineSeries> curves;
    for (const auto& s : results.splits) {
        dropout_bars.push_back({ split_label(s.key), s.dropout.overall_rate });
        svg::BoxSeries box{ split_label(s.key), {} };
        for (auto v : s.detection.per_cell_detected) {
            box.values.push_back(static_cast<double>(v));
        }
        boxes.push_back(std::move(box));
        svg::LineSeries line{ split_label(s.key), {}, s.cumulative.y };
        for (auto x : s.cumulative.x) {
            line.x.push_back(static_cast<double>(x));
        }
        curves.push_back(std::move(line));
    }
    save("dropout.svg", svg::bar_chart("Dropout rate: " + results.sample, "fraction of zero entries", dropout_bars));
    save("detection.svg", svg::boxplot("Genes detected per cell: " + results.sample, "genes detected", boxes, seed));
    save("cumulative.svg", svg::line_chart("Cumulative gene detection: " + results.sample, "cells", "genes detected", curves));

    std::vector<svg::Bar> sil_bars;
    for (const auto& s : results.splits) {
        for (const auto& e : s.embeddings) {
            if (e.silhouette) {
                sil_bars.push_back({ split_label(s.key) + " " + to_string(e.embedding.method), e.silhouette->mean });
            }
        }
    }
    save("silhouette.svg", svg::bar_chart("Mean silhouette: " + results.sample, "silhouette", sil_bars));

    std::set<EmbeddingMethod> methods = embedding_methods(results);
    methods.insert(EmbeddingMethod::pca);
    methods.insert(EmbeddingMethod::tsne);
    for (auto method : methods) {
        std::vector<svg::ScatterPanel> panels;
        for (const auto& s : results.splits) {
            auto run = find_run(s, method);
            if (!run) {
                continue;
            }
            if (run->clusters.k == 0 || run->clusters.labels.size() != run->embedding.n_cells()) {
                throw std::invalid_argument("embedding for " + split_label(s.key) + " has no cluster labels");
            }
            panels.push_back({ split_label(s.key) + " (k = " + std::to_string(run->clusters.k) + ")", run->embedding.coordinates, run->clusters.labels });
        }
        std::string name = std::string("embedding_") + to_string(method) + ".svg";
        std::string title = std::string(method == EmbeddingMethod::pca ? "PCA" : "t-SNE") + ": " + results.sample;
        if (panels.empty()) {
            panels.push_back({ "no data", Eigen::MatrixXd(0, 2), {} });
        }
        save(name, svg::scatter(title, panels));
    }
    return written;
}

CsvRows read_csv_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    CsvRows out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (first) {
            out.header = split_csv_line(line);
            first = false;
        } else if (!line.empty()) {
            out.rows.push_back(split_csv_line(line));
        }
    }
    return out;
}

}
