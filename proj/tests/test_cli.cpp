#include <catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "scbench/cli.hpp"
#include "scbench/report.hpp"
#include "scbench/svg.hpp"

using namespace scbench;
namespace fs = std::filesystem;

namespace {

fs::path fresh(const std::string& name) {
    auto dir = fs::temp_directory_path() / "scbench_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "scbench");
    return cli_main(args);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

}

TEST_CASE("usage errors exit with 2") {
    CHECK(run({}) == 2);
    CHECK(run({ "bogus" }) == 2);
    CHECK(run({ "pipeline" }) == 2);
    CHECK(run({ "pipeline", "--matrix", "/nonexistent.mtx", "--cells", "/nonexistent.csv" }) == 2);
}

TEST_CASE("synth, split and stage commands") {
    auto dir = fresh("stages");
    auto data = (dir / "data").string();
    REQUIRE(run({ "synth", "-o", data, "--clusters", "3", "--n-genes", "200", "--group", "plate:1:0.2:20", "--group", "droplet:1:0.6:30" }) == 0);
    auto matrix = data + "/matrix.mtx", cells = data + "/cells.csv";

    REQUIRE(run({ "split", "--matrix", matrix, "--cells", cells, "-o", (dir / "split").string() }) == 0);
    CHECK(fs::exists(dir / "split" / "plate__1" / "matrix.mtx"));
    CHECK(fs::exists(dir / "split" / "droplet__1" / "cells.csv"));
    auto dims = read_csv_rows(dir / "split" / "dimensions.csv");
    REQUIRE(dims.rows.size() == 2);
    CHECK(dims.rows[0][1] == "droplet");
    CHECK(dims.rows[0][3] == "90");
    CHECK(dims.rows[1][3] == "60");

    REQUIRE(run({ "qc", "--matrix", matrix, "--cells", cells, "-o", (dir / "qc").string() }) == 0);
    CHECK(fs::exists(dir / "qc" / "dropout.csv"));
    CHECK(fs::exists(dir / "qc" / "cumulative.svg"));
    CHECK_FALSE(fs::exists(dir / "qc" / "clusters.csv"));

    REQUIRE(run({ "filter", "--matrix", matrix, "--cells", cells, "-o", (dir / "filter").string(), "--cv-fraction", "0.1" }) == 0);
    CHECK(fs::exists(dir / "filter" / "filter_trace.json"));

    auto normalized = (dir / "norm").string();
    REQUIRE(run({ "normalize", "--matrix", (dir / "filter" / "matrix.mtx").string(), "--cells", (dir / "filter" / "cells.csv").string(), "-o", normalized }) == 0);
    auto norm_csv = normalized + "/normalized.csv";
    REQUIRE(fs::exists(norm_csv));

    auto emb = (dir / "emb").string();
    REQUIRE(run({ "embed", "--expression", norm_csv, "--embed-method", "pca", "-o", emb }) == 0);
    REQUIRE(run({ "embed", "--expression", norm_csv, "--embed-method", "tsne", "--perplexity", "10", "--iters", "300", "-o", emb }) == 0);
    auto pca_csv = read_csv_rows(emb + "/embedding_pca.csv");
    CHECK(pca_csv.header == std::vector<std::string>{ "cell_id", "dim1", "dim2" });
    CHECK(pca_csv.rows.size() == 150);

    auto cl = (dir / "cl").string();
    REQUIRE(run({ "cluster", "--embedding", emb + "/embedding_pca.csv", "--k", "3", "-o", cl }) == 0);
    REQUIRE(run({ "cluster", "--embedding", emb + "/embedding_pca.csv", "--cluster-method", "hclust", "--linkage", "average", "--k", "3", "-o", cl + "h" }) == 0);
    REQUIRE(run({ "evaluate", "--embedding", emb + "/embedding_pca.csv", "--clusters", cl + "/clusters.csv", "--cells", cells, "-o", cl }) == 0);
    auto eval = slurp(cl + "/evaluation.json");
    CHECK(eval.find("ari_vs_cell_type") != std::string::npos);
    CHECK(eval.find("mean_silhouette") != std::string::npos);

    CHECK(run({ "cluster", "--embedding", emb + "/embedding_pca.csv", "--cluster-method", "hclust", "--metric", "one-minus-correlation", "--linkage", "ward", "-o", cl }) == 2);
    CHECK(run({ "embed", "--expression", norm_csv, "--embed-method", "tsne", "--perplexity", "60", "-o", emb }) == 2);
}

TEST_CASE("pipeline writes every table and figure and report redraws them") {
    auto dir = fresh("pipeline");
    auto data = (dir / "data").string();
    REQUIRE(run({ "synth", "-o", data, "--n-genes", "150", "--cells-per-cluster", "20" }) == 0);
    auto out = (dir / "out").string();
    REQUIRE(run({ "pipeline", "--matrix", data + "/matrix.mtx", "--cells", data + "/cells.csv", "--k", "3", "--k-range", "2:4", "--iters", "250", "--perplexity", "10", "-o", out }) == 0);
    for (auto name : { "dimensions.csv", "dropout.csv", "detection.csv", "cumulative.csv", "embedding_pca.csv", "embedding_tsne.csv", "clusters.csv", "silhouette.csv", "summary.json", "dropout.svg", "detection.svg", "cumulative.svg", "silhouette.svg", "embedding_pca.svg", "embedding_tsne.svg" }) {
        CHECK(fs::exists(fs::path(out) / name));
    }
    auto pca_svg = slurp(fs::path(out) / "embedding_pca.svg");
    CHECK(count(pca_svg, "<circle") == 60);
    CHECK(pca_svg.find("<metadata>") != std::string::npos);
    auto sil = read_csv_rows(fs::path(out) / "silhouette.csv");
    CHECK(sil.rows.size() == 6);

    auto redraw = (dir / "redraw").string();
    REQUIRE(run({ "report", "--input-dir", out, "-o", redraw }) == 0);
    CHECK(slurp(fs::path(redraw) / "embedding_pca.svg") == pca_svg);
    CHECK(slurp(fs::path(redraw) / "dropout.svg") == slurp(fs::path(out) / "dropout.svg"));
}

TEST_CASE("synthetic defaults recover their clusters end to end") {
    auto dir = fresh("roundtrip");
    auto data = (dir / "data").string(), out = (dir / "out").string();
    auto t0 = std::chrono::steady_clock::now();
    REQUIRE(run({ "synth", "-o", data }) == 0);
    REQUIRE(run({ "pipeline", "--matrix", data + "/matrix.mtx", "--cells", data + "/cells.csv", "--genes", data + "/genes.csv", "--k", "3", "-o", out }) == 0);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 60);
    std::ifstream in(fs::path(out) / "summary.json");
    auto summary = nlohmann::json::parse(in);
    bool found = false;
    for (const auto& split : summary["splits"]) {
        for (const auto& e : split["embeddings"]) {
            if (e["method"] == "pca") {
                found = true;
                CHECK(e["ari_vs_cell_type"].get<double>() >= 0.9);
            }
        }
    }
    CHECK(found);
}

TEST_CASE("empty results give header-only tables") {
    auto dir = fresh("empty");
    StudyResults empty;
    emit_tables(empty, dir);
    auto dropout = slurp(dir / "dropout.csv");
    CHECK(dropout == "sample,method,replicate,overall_dropout,median_genes_detected\n");
    CHECK(read_csv_rows(dir / "clusters.csv").rows.empty());
}

TEST_CASE("17-digit floats round trip") {
    std::mt19937_64 gen(19);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        double v = u(gen) * std::pow(10.0, static_cast<double>(static_cast<int>(gen() % 40) - 20));
        CHECK(std::stod(format_real(v)) == v);
    }
}

TEST_CASE("config file values are overridden by flags") {
    auto dir = fresh("config");
    auto data = (dir / "data").string();
    REQUIRE(run({ "synth", "-o", data, "--n-genes", "100", "--cells-per-cluster", "10" }) == 0);
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# test config\nk = 5\ncluster-method = hclust\nlinkage = average\n";
    }
    auto out = (dir / "out").string();
    REQUIRE(run({ "pipeline", "--config", (dir / "run.cfg").string(), "--matrix", data + "/matrix.mtx", "--cells", data + "/cells.csv", "--k", "2", "--iters", "250", "--perplexity", "5", "-o", out }) == 0);
    auto summary = slurp(fs::path(out) / "summary.json");
    CHECK(summary.find("\"linkage\": \"average\"") != std::string::npos);
    CHECK(summary.find("\"method\": \"hclust\"") != std::string::npos);
    auto clusters = read_csv_rows(fs::path(out) / "clusters.csv");
    CHECK(clusters.rows.at(0).at(5) == "2");
}

TEST_CASE("data errors exit with 1") {
    auto dir = fresh("bad");
    {
        std::ofstream m(dir / "m.mtx");
        m << "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 1 -3\n";
        std::ofstream c(dir / "c.csv");
        c << "cell_id,method,replicate\na,p,1\nb,p,1\n";
    }
    CHECK(run({ "qc", "--matrix", (dir / "m.mtx").string(), "--cells", (dir / "c.csv").string(), "-o", (dir / "o").string() }) == 1);
}

TEST_CASE("svg primitives") {
    Eigen::MatrixXd pts(3, 2);
    pts << 0, 0, 1, 1, 2, 0;
    auto doc = svg::scatter("t", { { "panel <a>", pts, { 0, 1, 1 } } }, "meta");
    CHECK(count(doc, "<circle") == 3);
    CHECK(doc.find("panel &lt;a&gt;") != std::string::npos);
    CHECK_THROWS_AS(svg::scatter("t", {}, ""), std::invalid_argument);
    CHECK_THROWS_AS(svg::scatter("t", { { "p", pts, { 0 } } }, ""), std::invalid_argument);
    auto box = svg::boxplot("b", "y", { { "x", { 1, 2, 3, 4, 5 } } }, 1);
    CHECK(box.find("<svg") != std::string::npos);
    CHECK(box.find("</svg>") != std::string::npos);
    CHECK(format_real(0.1) == "0.10000000000000001");
}
