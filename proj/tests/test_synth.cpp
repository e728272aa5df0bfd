#include <catch_amalgamated.hpp>

#include "scbench/qc.hpp"
#include "scbench/rng.hpp"
#include "scbench/synth.hpp"

using namespace scbench;

TEST_CASE("rng variates have the right moments") {
    Rng rng(123);
    const int n = 200000;
    double su = 0, sn = 0, snn = 0, sg = 0, sp = 0, sp_big = 0;
    for (int i = 0; i < n; ++i) {
        double u = rng.uniform();
        REQUIRE(u >= 0);
        REQUIRE(u < 1);
        su += u;
        double z = rng.normal();
        sn += z;
        snn += z * z;
        sg += rng.gamma(2.5);
        sp += static_cast<double>(rng.poisson(3.2));
        sp_big += static_cast<double>(rng.poisson(40));
    }
    CHECK(su / n == Catch::Approx(0.5).margin(0.01));
    CHECK(sn / n == Catch::Approx(0).margin(0.01));
    CHECK(snn / n == Catch::Approx(1).margin(0.02));
    CHECK(sg / n == Catch::Approx(2.5).margin(0.03));
    CHECK(sp / n == Catch::Approx(3.2).margin(0.03));
    CHECK(sp_big / n == Catch::Approx(40).margin(0.1));
    for (int i = 0; i < 1000; ++i) {
        CHECK(rng.below(7) < 7);
    }
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("generated data has the requested shape and labels") {
    SynthConfig cfg;
    cfg.n_clusters = 4;
    cfg.cells_per_cluster = 25;
    cfg.n_genes = 120;
    cfg.n_marker_genes_per_cluster = 10;
    auto data = generate(cfg);
    CHECK(data.matrix.n_cells() == 100);
    CHECK(data.matrix.n_genes() == 120);
    CHECK(data.true_labels.size() == 100);
    CHECK(data.cells[0].cell_type == std::optional<std::string>("cluster_0"));
    CHECK(data.cells[99].cell_type == std::optional<std::string>("cluster_3"));
    CHECK(data.cells[0].method == "synthetic");

    // Marker genes of cluster 0 are more expressed in cluster 0.
    double inside = 0, outside = 0;
    for (std::size_t g = 0; g < 10; ++g) {
        for (std::size_t c = 0; c < 100; ++c) {
            (data.true_labels[c] == 0 ? inside : outside) += data.matrix.at(c, g);
        }
    }
    CHECK(inside / 25 > 2 * outside / 75);

    CHECK(generate(cfg).matrix == data.matrix);
    cfg.seed = 7;
    CHECK_FALSE(generate(cfg).matrix == data.matrix);
}

TEST_CASE("dropout probability raises sparsity") {
    SynthConfig cfg;
    cfg.dropout_prob = 0.1;
    double low = dropout_rate(generate(cfg).matrix).overall_rate;
    cfg.dropout_prob = 0.8;
    double high = dropout_rate(generate(cfg).matrix).overall_rate;
    CHECK(high > low);
    CHECK(high > 0.8);
}

TEST_CASE("invalid configs and concatenation") {
    SynthConfig bad;
    bad.n_marker_genes_per_cluster = 200;
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);
    bad = {};
    bad.dropout_prob = 1;
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);

    SynthConfig a, b;
    a.cells_per_cluster = 5;
    b.cells_per_cluster = 7;
    a.method = "plate";
    b.method = "droplet";
    a.cell_prefix = "p_";
    b.cell_prefix = "d_";
    auto joined = concatenate({ generate(a), generate(b) });
    CHECK(joined.matrix.n_cells() == 36);
    CHECK(joined.cells[15].method == "droplet");
    CHECK(joined.matrix.cell_ids()[15] == "d_0");
}
