#include "scbench/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "scbench/ingest.hpp"
#include "scbench/report.hpp"
#include "scbench/rng.hpp"
#include "scbench/study.hpp"
#include "scbench/svg.hpp"
#include "scbench/synth.hpp"

namespace scbench {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InputOptions {
    std::string matrix;
    std::string cells;
    std::string genes;
    std::string cell_ids;
    bool transpose = false;
    bool join_by_id = false;
    std::string sample;
};

struct ClusterFlags {
    std::string method = "kmeans";
    std::size_t k = 9;
    std::string k_range;
    std::string metric = "euclidean";
    std::string linkage = "ward";
    std::size_t restarts = 10;
};

struct EmbedFlags {
    double perplexity = 30;
    bool tsne_no_pca = false;
    std::size_t iters = 1000;
    std::size_t dims = 2;
    double learning_rate = 200;
    std::string init = "pca";
};

struct State {
    InputOptions input;
    std::string output_dir = "out";
    double zero_threshold = 0.8;
    double cv_fraction = 0.15;
    std::string normalize_axis = "cells";
    bool log1p = false;
    EmbedFlags embed;
    ClusterFlags cluster;
    std::uint64_t seed = 42;
    std::size_t permutations = 20;

    // Subcommand-specific inputs.
    std::string expression;
    std::string embedding_file;
    std::string clusters_file;
    std::string embed_method = "pca";
    std::string input_dir;

    SynthConfig synth;
    std::vector<std::string> groups;
};

void add_input_options(CLI::App* sub, State& s, bool cells_required) {
    sub->add_option("--matrix", s.input.matrix, "Matrix Market count matrix (plain or gzip)")->required()->check(CLI::ExistingFile);
    auto cells = sub->add_option("--cells", s.input.cells, "Cell annotation CSV (cell_id, method, replicate[, cell_type])")->check(CLI::ExistingFile);
    if (cells_required) {
        cells->required();
    }
    sub->add_option("--genes", s.input.genes, "Gene annotation CSV (gene_id[, gene_name])")->check(CLI::ExistingFile);
    sub->add_option("--cell-ids", s.input.cell_ids, "Identifiers of the matrix cells, one per line (for --join-by-id)")->check(CLI::ExistingFile);
    sub->add_flag("--transpose", s.input.transpose, "Matrix file stores cells in rows (default: genes in rows)");
    sub->add_flag("--join-by-id", s.input.join_by_id, "Match annotations to matrix cells by id instead of position");
    sub->add_option("--sample", s.input.sample, "Sample name used in tables (default: matrix file stem)");
}

void add_output(CLI::App* sub, State& s) {
    sub->add_option("-o,--output-dir", s.output_dir, "Output directory");
}

void add_filter_options(CLI::App* sub, State& s) {
    sub->add_option("--zero-threshold", s.zero_threshold, "Remove genes with a zero fraction above this")->capture_default_str();
    sub->add_option("--cv-fraction", s.cv_fraction, "Fraction of lowest-CV genes to remove")->capture_default_str();
}

void add_normalize_options(CLI::App* sub, State& s) {
    sub->add_option("--normalize-axis", s.normalize_axis, "Distributions made identical: cells or genes")->check(CLI::IsMember({ "cells", "genes" }))->capture_default_str();
    sub->add_flag("--log1p", s.log1p, "Apply log(1 + x) before normalization");
}

void add_embed_options(CLI::App* sub, State& s) {
    sub->add_option("--perplexity", s.embed.perplexity, "t-SNE perplexity")->capture_default_str();
    sub->add_flag("--tsne-no-pca", s.embed.tsne_no_pca, "Run t-SNE on the full input instead of 50 principal components");
    sub->add_option("--iters", s.embed.iters, "t-SNE iterations")->capture_default_str();
    sub->add_option("--learning-rate", s.embed.learning_rate, "t-SNE learning rate")->capture_default_str();
    sub->add_option("--tsne-init", s.embed.init, "t-SNE initialization: pca or random")->check(CLI::IsMember({ "pca", "random" }))->capture_default_str();
}

void add_cluster_options(CLI::App* sub, State& s) {
    sub->add_option("--k", s.cluster.k, "Number of clusters")->capture_default_str();
    sub->add_option("--k-range", s.cluster.k_range, "Inclusive silhouette sweep range, LO:HI");
    sub->add_option("--cluster-method", s.cluster.method, "kmeans or hclust")->check(CLI::IsMember({ "kmeans", "hclust" }))->capture_default_str();
    sub->add_option("--metric", s.cluster.metric, "euclidean or one-minus-correlation")->check(CLI::IsMember({ "euclidean", "one-minus-correlation" }))->capture_default_str();
    sub->add_option("--linkage", s.cluster.linkage, "single, complete, average or ward")->check(CLI::IsMember({ "single", "complete", "average", "ward" }))->capture_default_str();
    sub->add_option("--restarts", s.cluster.restarts, "k-means restarts")->capture_default_str();
}

void add_seed(CLI::App* sub, State& s) {
    sub->add_option("--seed", s.seed, "Random seed")->capture_default_str();
}

// Expand `key = value` lines into flags placed before the command-line arguments, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) {
        return rest;
    }
    std::ifstream in(config_path);
    if (!in) {
        throw UsageError("cannot open config file " + config_path);
    }
    std::vector<std::string> from_file;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        auto eq = line.find('=');
        auto trim = [](std::string v) {
            v.erase(0, v.find_first_not_of(" \t\r"));
            v.erase(v.find_last_not_of(" \t\r") + 1);
            return v;
        };
        std::string key = trim(eq == std::string::npos ? line : line.substr(0, eq));
        if (key.empty()) {
            continue;
        }
        std::string value = eq == std::string::npos ? "true" : trim(line.substr(eq + 1));
        if (value == "true") {
            from_file.push_back("--" + key);
        } else if (value != "false") {
            from_file.push_back("--" + key);
            from_file.push_back(value);
        }
    }

    // Program name then subcommand, then file values, then explicit flags.
    std::size_t head = std::min<std::size_t>(rest.size(), 2);
    out.insert(out.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(head));
    out.insert(out.end(), from_file.begin(), from_file.end());
    out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(head), rest.end());
    return out;
}

AnnotatedMatrix load_input(const InputOptions& in) {
    auto orientation = in.transpose ? Orientation::cells_by_genes : Orientation::genes_by_cells;
    auto matrix = read_matrix_market(in.matrix, orientation);
    std::vector<GeneAnnotation> genes;
    if (!in.genes.empty()) {
        genes = read_gene_annotations(in.genes);
    }
    std::vector<CellAnnotation> cells;
    if (!in.cells.empty()) {
        cells = read_cell_annotations(in.cells);
    } else {
        for (const auto& id : matrix.cell_ids()) {
            cells.push_back({ id, "all", "1", std::nullopt });
        }
    }
    std::optional<std::vector<std::string>> row_ids;
    if (in.join_by_id) {
        if (in.cell_ids.empty()) {
            throw UsageError("--join-by-id needs --cell-ids naming the matrix cells");
        }
        row_ids = read_id_list(in.cell_ids);
    } else if (!in.cell_ids.empty()) {
        throw UsageError("--cell-ids is only used with --join-by-id");
    }
    return annotate(matrix, std::move(cells), std::move(genes), row_ids);
}

std::string sample_name(const InputOptions& in) {
    if (!in.sample.empty()) {
        return in.sample;
    }
    fs::path p(in.matrix);
    std::string stem = p.stem().string();
    if (p.extension() == ".gz") {
        stem = fs::path(stem).stem().string();
    }
    return stem;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw UsageError("--k-range must look like LO:HI");
    }
    try {
        return { std::stoul(text.substr(0, colon)), std::stoul(text.substr(colon + 1)) };
    } catch (const std::exception&) {
        throw UsageError("--k-range must look like LO:HI");
    }
}

StudyOptions study_options(const State& s) {
    StudyOptions o;
    o.sample = sample_name(s.input);
    o.cumulative.n_permutations = s.permutations;
    o.cumulative.seed = s.seed;
    o.preprocess.filter.zero_fraction_threshold = s.zero_threshold;
    o.preprocess.filter.cv_drop_fraction = s.cv_fraction;
    o.preprocess.axis = s.normalize_axis == "genes" ? NormalizeAxis::genes : NormalizeAxis::cells;
    o.preprocess.log1p = s.log1p;
    o.tsne.perplexity = s.embed.perplexity;
    o.tsne.iterations = s.embed.iters;
    o.tsne.learning_rate = s.embed.learning_rate;
    o.tsne.init = s.embed.init == "random" ? TsneInit::random : TsneInit::pca;
    o.tsne.pca_dims = s.embed.tsne_no_pca ? 0 : 50;
    o.tsne.seed = s.seed;
    o.cluster_method = s.cluster.method == "hclust" ? ClusterMethod::hclust : ClusterMethod::kmeans;
    o.k = s.cluster.k;
    if (!s.cluster.k_range.empty()) {
        o.k_range = parse_range(s.cluster.k_range);
    }
    o.metric = parse_metric(s.cluster.metric);
    o.linkage = parse_linkage(s.cluster.linkage);
    o.restarts = s.cluster.restarts;
    o.seed = s.seed;
    return o;
}

nlohmann::json input_json(const InputOptions& in) {
    return {
        { "matrix", in.matrix },
        { "cells", in.cells },
        { "genes", in.genes },
        { "cell_ids", in.cell_ids },
        { "transpose", in.transpose },
        { "join_by_id", in.join_by_id },
    };
}

std::string safe_name(const std::string& text) {
    std::string out;
    for (char ch : text) {
        out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '.' ? ch : '_';
    }
    return out;
}

void write_bundle(const CountMatrix& m, const std::vector<CellAnnotation>& cells, const fs::path& dir, bool transpose) {
    fs::create_directories(dir);
    write_matrix_market(m, dir / "matrix.mtx", transpose ? Orientation::cells_by_genes : Orientation::genes_by_cells);
    write_cell_annotations(cells, dir / "cells.csv");
    std::vector<GeneAnnotation> genes;
    for (const auto& id : m.gene_ids()) {
        genes.push_back({ id, std::nullopt });
    }
    write_gene_annotations(genes, dir / "genes.csv");
}

// Dense `cell_id,<columns...>` tables used between the standalone stages.
void write_dense_csv(const fs::path& path, const std::vector<std::string>& row_ids, const std::vector<std::string>& columns, const Eigen::MatrixXd& values) {
    std::ostringstream out;
    out << "cell_id";
    for (const auto& c : columns) {
        out << ',' << csv_escape(c);
    }
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << csv_escape(row_ids[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            out << ',' << format_real(values(i, j));
        }
        out << '\n';
    }
    write_text(path, out.str());
}

struct DenseTable {
    std::vector<std::string> row_ids;
    std::vector<std::string> columns;
    Eigen::MatrixXd values;
};

DenseTable read_dense_csv(const fs::path& path) {
    auto csv = read_csv_rows(path);
    if (csv.header.empty() || csv.header[0] != "cell_id") {
        throw DataError(path.string() + ": first column must be cell_id");
    }
    DenseTable out;
    out.columns.assign(csv.header.begin() + 1, csv.header.end());
    out.values.resize(static_cast<Eigen::Index>(csv.rows.size()), static_cast<Eigen::Index>(out.columns.size()));
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        if (row.size() != csv.header.size()) {
            throw DataError(path.string() + ": row " + std::to_string(r + 2) + " has the wrong number of fields");
        }
        out.row_ids.push_back(row[0]);
        for (std::size_t c = 1; c < row.size(); ++c) {
            try {
                out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = std::stod(row[c]);
            } catch (const std::exception&) {
                throw DataError(path.string() + ": malformed number '" + row[c] + "'");
            }
        }
    }
    return out;
}

std::vector<std::size_t> read_labels(const fs::path& path, const std::vector<std::string>& order) {
    auto csv = read_csv_rows(path);
    auto id_col = std::find(csv.header.begin(), csv.header.end(), "cell_id");
    auto label_col = std::find(csv.header.begin(), csv.header.end(), "label");
    if (id_col == csv.header.end() || label_col == csv.header.end()) {
        throw DataError(path.string() + ": needs cell_id and label columns");
    }
    std::map<std::string, std::size_t> by_id;
    auto ic = static_cast<std::size_t>(id_col - csv.header.begin()), lc = static_cast<std::size_t>(label_col - csv.header.begin());
    for (const auto& row : csv.rows) {
        by_id[row.at(ic)] = std::stoul(row.at(lc));
    }
    std::vector<std::size_t> out;
    for (const auto& id : order) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw DataError("no cluster label for cell '" + id + "'");
        }
        out.push_back(it->second);
    }
    return out;
}

int run_synth(State& s) {
    std::vector<SynthData> parts;
    if (s.groups.empty()) {
        parts.push_back(generate(s.synth));
    } else {
        for (std::size_t g = 0; g < s.groups.size(); ++g) {
            std::vector<std::string> fields;
            std::stringstream ss(s.groups[g]);
            std::string f;
            while (std::getline(ss, f, ':')) {
                fields.push_back(f);
            }
            if (fields.size() != 4) {
                throw UsageError("--group must be METHOD:REPLICATE:DROPOUT:CELLS_PER_CLUSTER");
            }
            SynthConfig cfg = s.synth;
            cfg.method = fields[0];
            cfg.replicate = fields[1];
            try {
                cfg.dropout_prob = std::stod(fields[2]);
                cfg.cells_per_cluster = std::stoul(fields[3]);
            } catch (const std::exception&) {
                throw UsageError("--group must be METHOD:REPLICATE:DROPOUT:CELLS_PER_CLUSTER");
            }
            cfg.seed = derive_seed(s.synth.seed, g);
            cfg.cell_prefix = safe_name(cfg.method) + "_" + safe_name(cfg.replicate) + "_";
            parts.push_back(generate(cfg));
        }
    }
    auto data = parts.size() == 1 ? std::move(parts.front()) : concatenate(parts);
    fs::path dir = s.output_dir;
    fs::create_directories(dir);
    write_matrix_market(data.matrix, dir / "matrix.mtx", s.input.transpose ? Orientation::cells_by_genes : Orientation::genes_by_cells);
    write_cell_annotations(data.cells, dir / "cells.csv");
    write_gene_annotations(data.genes, dir / "genes.csv");
    return 0;
}

int run_split(State& s) {
    auto data = load_input(s.input);
    auto splits = split_by_method_replicate(data.matrix, data.cells);
    fs::path dir = s.output_dir;
    for (const auto& [key, split] : splits) {
        write_bundle(split.matrix, split.cells, dir / (safe_name(key.method) + "__" + safe_name(key.replicate)), s.input.transpose);
    }
    write_dimensions_csv(summarize_dimensions(sample_name(s.input), splits), dir / "dimensions.csv");
    return 0;
}

int run_qc(State& s) {
    auto data = load_input(s.input);
    auto options = study_options(s);
    StudyResults results;
    results.sample = options.sample;
    results.config = { { "input", input_json(s.input) }, { "cumulative", { { "n_permutations", s.permutations }, { "seed", s.seed } } } };
    for (const auto& [key, split] : split_by_method_replicate(data.matrix, data.cells)) {
        SplitResults r;
        r.key = key;
        r.cell_ids = split.matrix.cell_ids();
        r.n_genes = split.matrix.n_genes();
        r.dropout = dropout_rate(split.matrix);
        r.detection = detection_stats(split.matrix);
        r.cumulative = cumulative_detection(split.matrix, options.cumulative);
        results.splits.push_back(std::move(r));
    }
    fs::path dir = s.output_dir;
    emit_tables(results, dir);
    // Only the QC figures apply here.
    auto plots = emit_plots(results, dir, s.seed);
    for (const auto& p : plots) {
        auto name = p.filename().string();
        if (name.rfind("embedding_", 0) == 0 || name == "silhouette.svg") {
            fs::remove(p);
        }
    }
    for (auto name : { "embedding_pca.csv", "embedding_tsne.csv", "clusters.csv", "silhouette.csv" }) {
        fs::remove(dir / name);
    }
    return 0;
}

int run_filter(State& s) {
    auto data = load_input(s.input);
    FilterConfig cfg{ s.zero_threshold, s.cv_fraction };
    auto sparse = filter_sparse_genes(data.matrix, cfg);
    auto low_cv = filter_low_cv(sparse.matrix, cfg);
    fs::path dir = s.output_dir;
    write_bundle(low_cv.matrix, data.cells, dir, s.input.transpose);
    nlohmann::json trace = {
        { "config", { { "input", input_json(s.input) }, { "zero_fraction_threshold", cfg.zero_fraction_threshold }, { "cv_drop_fraction", cfg.cv_drop_fraction } } },
        { "genes_in", data.matrix.n_genes() },
        { "removed_by_sparsity", sparse.trace.removed_by_sparsity },
        { "removed_by_cv", low_cv.trace.removed_by_cv },
        { "genes_out", low_cv.matrix.n_genes() },
        { "removed_sparse_ids", sparse.trace.removed_sparse_ids },
        { "removed_cv_ids", low_cv.trace.removed_cv_ids },
    };
    write_text(dir / "filter_trace.json", trace.dump(2) + "\n");
    return 0;
}

int run_normalize(State& s) {
    auto data = load_input(s.input);
    auto dense = to_dense(data.matrix);
    if (s.log1p) {
        dense.values = dense.values.array().log1p().matrix();
    }
    auto normalized = quantile_normalize(dense, s.normalize_axis == "genes" ? NormalizeAxis::genes : NormalizeAxis::cells);
    fs::path dir = s.output_dir;
    fs::create_directories(dir);
    write_dense_csv(dir / "normalized.csv", normalized.cell_ids, normalized.gene_ids, normalized.values);
    return 0;
}

int run_embed(State& s) {
    auto table = read_dense_csv(s.expression);
    auto options = study_options(s);
    Embedding embedding;
    if (s.embed_method == "pca") {
        PcaOptions pca_opt;
        pca_opt.components = s.embed.dims;
        embedding = pca_fit_transform(table.values, pca_opt).embedding;
    } else {
        auto t = options.tsne;
        t.dims = s.embed.dims;
        embedding = tsne(table.values, t).embedding;
    }
    std::vector<std::string> columns;
    for (std::size_t d = 0; d < embedding.dims(); ++d) {
        columns.push_back("dim" + std::to_string(d + 1));
    }
    fs::path dir = s.output_dir;
    fs::create_directories(dir);
    write_dense_csv(dir / ("embedding_" + s.embed_method + ".csv"), table.row_ids, columns, embedding.coordinates);
    nlohmann::json meta = { { "method", s.embed_method }, { "params", embedding.params }, { "seed", s.seed }, { "input", s.expression } };
    write_text(dir / ("embedding_" + s.embed_method + ".json"), meta.dump(2) + "\n");
    return 0;
}

int run_cluster(State& s) {
    auto table = read_dense_csv(s.embedding_file);
    auto options = study_options(s);
    auto result = cluster_points(table.values, options.k, options);
    std::ostringstream out;
    out << "cell_id,label\n";
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
        out << csv_escape(table.row_ids[i]) << ',' << result.labels[i] << '\n';
    }
    fs::path dir = s.output_dir;
    fs::create_directories(dir);
    write_text(dir / "clusters.csv", out.str());
    nlohmann::json meta = { { "config", options_json(options)["cluster"] }, { "seed", s.seed }, { "k", result.k }, { "input", s.embedding_file } };
    if (result.objective) {
        meta["objective"] = *result.objective;
    }
    write_text(dir / "clusters.json", meta.dump(2) + "\n");
    return 0;
}

int run_evaluate(State& s) {
    auto table = read_dense_csv(s.embedding_file);
    auto labels = read_labels(s.clusters_file, table.row_ids);
    auto metric = parse_metric(s.cluster.metric);
    auto report = silhouette(table.values, labels, metric);
    std::ostringstream per_point;
    per_point << "cell_id,label,silhouette\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        per_point << csv_escape(table.row_ids[i]) << ',' << labels[i] << ',' << format_real(report.per_point[i]) << '\n';
    }
    std::size_t k = report.per_cluster_mean.size();
    std::ostringstream summary;
    summary << "k,mean_silhouette\n" << k << ',' << format_real(report.mean) << '\n';

    nlohmann::json meta = { { "metric", to_string(metric) }, { "k", k }, { "mean_silhouette", report.mean }, { "per_cluster_mean", report.per_cluster_mean } };
    if (!s.input.cells.empty()) {
        auto cells = read_cell_annotations(s.input.cells);
        std::map<std::string, std::string> types;
        for (const auto& c : cells) {
            if (c.cell_type) {
                types[c.cell_id] = *c.cell_type;
            }
        }
        std::vector<std::string> truth;
        for (const auto& id : table.row_ids) {
            auto it = types.find(id);
            if (it == types.end()) {
                truth.clear();
                break;
            }
            truth.push_back(it->second);
        }
        if (!truth.empty()) {
            meta["ari_vs_cell_type"] = adjusted_rand_index(encode_labels(truth), labels);
        }
    }
    fs::path dir = s.output_dir;
    fs::create_directories(dir);
    write_text(dir / "silhouette_points.csv", per_point.str());
    write_text(dir / "silhouette.csv", summary.str());
    write_text(dir / "evaluation.json", meta.dump(2) + "\n");
    return 0;
}

// Rebuild enough of a StudyResults from pipeline tables to redraw every figure.
StudyResults load_tables(const fs::path& dir) {
    StudyResults results;
    std::map<SplitKey, SplitResults> by_key;
    auto split_for = [&](const std::vector<std::string>& row) -> SplitResults& {
        results.sample = row.at(0);
        SplitKey key{ row.at(1), row.at(2) };
        auto& r = by_key[key];
        r.key = key;
        return r;
    };

    for (const auto& row : read_csv_rows(dir / "dropout.csv").rows) {
        auto& r = split_for(row);
        r.dropout.overall_rate = std::stod(row.at(3));
        r.detection.median = std::stod(row.at(4));
    }
    for (const auto& row : read_csv_rows(dir / "detection.csv").rows) {
        auto& r = split_for(row);
        r.cell_ids.push_back(row.at(3));
        r.detection.per_cell_detected.push_back(std::stoul(row.at(4)));
    }
    for (const auto& row : read_csv_rows(dir / "cumulative.csv").rows) {
        auto& r = split_for(row);
        r.cumulative.x.push_back(std::stoul(row.at(3)));
        r.cumulative.y.push_back(std::stod(row.at(4)));
    }

    std::map<std::pair<SplitKey, std::string>, EmbeddingRun> runs;
    for (auto method : { EmbeddingMethod::pca, EmbeddingMethod::tsne }) {
        fs::path path = dir / (std::string("embedding_") + to_string(method) + ".csv");
        if (!fs::exists(path)) {
            continue;
        }
        auto csv = read_csv_rows(path);
        std::map<SplitKey, std::vector<std::vector<double>>> coords;
        for (const auto& row : csv.rows) {
            std::vector<double> v;
            for (std::size_t c = 4; c < row.size(); ++c) {
                v.push_back(std::stod(row[c]));
            }
            coords[SplitKey{ row.at(1), row.at(2) }].push_back(std::move(v));
        }
        for (auto& [key, pts] : coords) {
            auto& run = runs[{ key, to_string(method) }];
            run.embedding.method = method;
            run.embedding.coordinates.resize(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(pts.empty() ? 0 : pts[0].size()));
            for (std::size_t i = 0; i < pts.size(); ++i) {
                for (std::size_t d = 0; d < pts[i].size(); ++d) {
                    run.embedding.coordinates(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = pts[i][d];
                }
            }
        }
    }
    for (const auto& row : read_csv_rows(dir / "clusters.csv").rows) {
        SplitKey key{ row.at(1), row.at(2) };
        auto& run = runs[{ key, row.at(3) }];
        run.cluster_method = row.at(4);
        run.clusters.k = std::stoul(row.at(5));
        run.clusters.labels.push_back(std::stoul(row.at(7)));
        if (!row.at(8).empty()) {
            if (!run.silhouette) {
                run.silhouette = SilhouetteReport{};
            }
            run.silhouette->per_point.push_back(std::stod(row.at(8)));
        }
    }
    for (auto& [key, run] : runs) {
        if (run.silhouette && !run.silhouette->per_point.empty()) {
            double total = 0;
            for (double v : run.silhouette->per_point) {
                total += v;
            }
            run.silhouette->mean = total / static_cast<double>(run.silhouette->per_point.size());
        }
        by_key[key.first].key = key.first;
        by_key[key.first].embeddings.push_back(std::move(run));
    }
    for (auto& [key, r] : by_key) {
        std::sort(r.embeddings.begin(), r.embeddings.end(), [](const EmbeddingRun& a, const EmbeddingRun& b) { return a.embedding.method < b.embedding.method; });
        results.splits.push_back(std::move(r));
    }
    if (fs::exists(dir / "summary.json")) {
        std::ifstream in(dir / "summary.json");
        auto j = nlohmann::json::parse(in, nullptr, false);
        if (!j.is_discarded() && j.contains("config")) {
            results.config = j["config"];
        }
    }
    return results;
}

int run_report(State& s) {
    auto results = load_tables(s.input_dir);
    fs::path dir = s.output_dir.empty() ? fs::path(s.input_dir) : fs::path(s.output_dir);
    emit_plots(results, dir, s.seed);
    return 0;
}

int run_pipeline(State& s) {
    auto data = load_input(s.input);
    auto options = study_options(s);
    auto results = run_study(data, options);
    results.config["input"] = input_json(s.input);
    fs::path dir = s.output_dir;
    emit_tables(results, dir);
    emit_plots(results, dir, s.seed);
    return 0;
}

void print_error(const char* kind, const std::string& message) {
    nlohmann::json j = { { "error", kind }, { "message", message } };
    std::cerr << j.dump() << std::endl;
}

}

int cli_main(const std::vector<std::string>& raw_args) {
    State s;
    CLI::App app{ "scbench: single-cell RNA-seq protocol comparison" };
    app.name("scbench");
    app.footer("Any subcommand also accepts --config FILE with `flag = value` lines; flags given on the command line win.");
    app.require_subcommand(1, 1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    int status = 0;

    auto synth = app.add_subcommand("synth", "Write a synthetic count matrix with annotations");
    add_output(synth, s);
    add_seed(synth, s);
    synth->add_option("--clusters", s.synth.n_clusters, "Number of clusters")->capture_default_str();
    synth->add_option("--cells-per-cluster", s.synth.cells_per_cluster, "Cells per cluster")->capture_default_str();
    synth->add_option("--n-genes", s.synth.n_genes, "Number of genes")->capture_default_str();
    synth->add_option("--markers", s.synth.n_marker_genes_per_cluster, "Marker genes per cluster")->capture_default_str();
    synth->add_option("--base-mean", s.synth.base_mean, "Mean count of non-marker genes")->capture_default_str();
    synth->add_option("--marker-fold", s.synth.marker_fold, "Up-regulation of marker genes")->capture_default_str();
    synth->add_option("--dropout", s.synth.dropout_prob, "Probability of zeroing each count")->capture_default_str();
    synth->add_option("--dispersion", s.synth.dispersion, "Negative binomial size parameter")->capture_default_str();
    synth->add_option("--method", s.synth.method, "Method name in the annotation")->capture_default_str();
    synth->add_option("--replicate", s.synth.replicate, "Replicate name in the annotation")->capture_default_str();
    synth->add_option("--group", s.groups, "Add a METHOD:REPLICATE:DROPOUT:CELLS_PER_CLUSTER group (repeatable)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    synth->add_flag("--transpose", s.input.transpose, "Write cells in rows (default: genes in rows)");
    synth->callback([&] { s.synth.seed = s.seed; status = run_synth(s); });

    auto split = app.add_subcommand("split", "Split an aggregate matrix per (method, replicate)");
    add_input_options(split, s, true);
    add_output(split, s);
    split->callback([&] { status = run_split(s); });

    auto qc = app.add_subcommand("qc", "Dropout, detection and cumulative detection per split");
    add_input_options(qc, s, true);
    add_output(qc, s);
    add_seed(qc, s);
    qc->add_option("--permutations", s.permutations, "Cell orderings averaged in the cumulative curve")->capture_default_str();
    qc->callback([&] { status = run_qc(s); });

    auto filter = app.add_subcommand("filter", "Sparsity and CV gene filters");
    add_input_options(filter, s, false);
    add_output(filter, s);
    add_filter_options(filter, s);
    filter->callback([&] { status = run_filter(s); });

    auto normalize = app.add_subcommand("normalize", "Quantile-normalize a count matrix into a dense table");
    add_input_options(normalize, s, false);
    add_output(normalize, s);
    add_normalize_options(normalize, s);
    normalize->callback([&] { status = run_normalize(s); });

    auto embed = app.add_subcommand("embed", "PCA or t-SNE of a dense expression table");
    embed->add_option("--expression", s.expression, "Dense CSV from `normalize`")->required()->check(CLI::ExistingFile);
    embed->add_option("--embed-method", s.embed_method, "pca or tsne")->check(CLI::IsMember({ "pca", "tsne" }))->capture_default_str();
    embed->add_option("--dims", s.embed.dims, "Output dimensions")->capture_default_str();
    add_embed_options(embed, s);
    add_output(embed, s);
    add_seed(embed, s);
    embed->callback([&] { status = run_embed(s); });

    auto cluster = app.add_subcommand("cluster", "Cluster an embedding table");
    cluster->add_option("--embedding", s.embedding_file, "Dense CSV from `embed`")->required()->check(CLI::ExistingFile);
    add_cluster_options(cluster, s);
    add_output(cluster, s);
    add_seed(cluster, s);
    cluster->callback([&] { status = run_cluster(s); });

    auto evaluate = app.add_subcommand("evaluate", "Silhouettes (and ARI against cell types) for a clustering");
    evaluate->add_option("--embedding", s.embedding_file, "Dense CSV from `embed`")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--clusters", s.clusters_file, "clusters.csv from `cluster`")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--cells", s.input.cells, "Cell annotation CSV with cell_type")->check(CLI::ExistingFile);
    evaluate->add_option("--metric", s.cluster.metric, "euclidean or one-minus-correlation")->check(CLI::IsMember({ "euclidean", "one-minus-correlation" }))->capture_default_str();
    add_output(evaluate, s);
    evaluate->callback([&] { status = run_evaluate(s); });

    auto report = app.add_subcommand("report", "Redraw SVG figures from pipeline tables");
    report->add_option("--input-dir", s.input_dir, "Directory written by `pipeline`")->required()->check(CLI::ExistingDirectory);
    report->add_option("-o,--output-dir", s.output_dir, "Output directory (default: the input directory)");
    add_seed(report, s);
    report->callback([&] {
        if (report->count("--output-dir") == 0) {
            s.output_dir.clear();
        }
        status = run_report(s);
    });

    auto pipeline = app.add_subcommand("pipeline", "Run every stage and write all tables and figures");
    add_input_options(pipeline, s, true);
    add_output(pipeline, s);
    add_seed(pipeline, s);
    add_filter_options(pipeline, s);
    add_normalize_options(pipeline, s);
    add_embed_options(pipeline, s);
    add_cluster_options(pipeline, s);
    pipeline->add_option("--permutations", s.permutations, "Cell orderings averaged in the cumulative curve")->capture_default_str();
    pipeline->callback([&] { status = run_pipeline(s); });

    try {
        auto args = expand_config(raw_args);
        std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    } catch (const UsageError& e) {
        print_error("usage", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        print_error("usage", e.what());
        return 2;
    } catch (const DataError& e) {
        print_error("data", e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("data", e.what());
        return 1;
    }
    return status;
}

int cli_main(int argc, char** argv) {
    return cli_main(std::vector<std::string>(argv, argv + argc));
}

}
