#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "scbench/ingest.hpp"
#include "scbench/parallel.hpp"
#include "scbench/qc.hpp"

using namespace scbench;

TEST_CASE("dropout matches dense zero counting") {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 1 + gen() % 30, g = 1 + gen() % 40;
        auto counts = oracle::random_counts(gen, n, g, 0.1 * static_cast<double>(gen() % 10));
        auto expected = oracle::zero_count(counts, g);
        auto got = dropout_rate(testing::to_matrix(counts, g));
        CHECK(got.overall_rate == expected.overall);
        CHECK(got.per_gene_rate == expected.per_gene);
    }
}

TEST_CASE("detection quartiles interpolate") {
    // Cells detecting 1..5 genes.
    std::vector<Triplet> t;
    for (Index c = 0; c < 5; ++c) {
        for (Index g = 0; g <= c; ++g) {
            t.push_back({ c, g, 1 });
        }
    }
    auto stats = detection_stats(from_triplets(t, 5, 5));
    CHECK(stats.per_cell_detected == std::vector<std::size_t>{ 1, 2, 3, 4, 5 });
    CHECK(stats.median == 3);
    CHECK(stats.q1 == 2);
    CHECK(stats.q3 == 4);

    auto even = detection_stats(from_triplets({ { 0, 0, 1 }, { 1, 0, 1 }, { 1, 1, 1 } }, 2, 2));
    CHECK(even.median == 1.5);
}

TEST_CASE("cumulative curve against exhaustive orderings") {
    std::mt19937_64 gen(33);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 2 + gen() % 4;
        auto counts = oracle::random_counts(gen, n, 8, 0.6);
        auto expected = oracle::exhaustive_cumulative(counts);
        auto curve = cumulative_detection(testing::to_matrix(counts, 8), { 1000, 1 });
        REQUIRE(curve.y.size() == n);
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(curve.x[k] == k + 1);
            CHECK(curve.y[k] == Catch::Approx(expected[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("three-cell curve averages all six orderings") {
    // Cell 0 detects {0}, cell 1 detects {0, 1}, cell 2 detects {2}.
    auto m = from_triplets({ { 0, 0, 1 }, { 1, 0, 1 }, { 1, 1, 1 }, { 2, 2, 1 } }, 3, 3);
    auto curve = cumulative_detection(m, { 6, 0 });
    CHECK(curve.n_permutations == 6);
    CHECK(curve.y[0] == Catch::Approx(4.0 / 3));
    CHECK(curve.y[1] == Catch::Approx(7.0 / 3));
    CHECK(curve.y[2] == 3);
}

TEST_CASE("cumulative curve is monotone, seeded and thread independent") {
    std::mt19937_64 gen(4);
    auto m = testing::to_matrix(oracle::random_counts(gen, 60, 40, 0.85), 40);
    set_thread_count(1);
    auto a = cumulative_detection(m, { 20, 9 });
    set_thread_count(4);
    auto b = cumulative_detection(m, { 20, 9 });
    set_thread_count(0);
    CHECK(a.y == b.y);
    for (std::size_t k = 1; k < a.y.size(); ++k) {
        CHECK(a.y[k] >= a.y[k - 1]);
    }
    auto c = cumulative_detection(m, { 20, 10 });
    CHECK(c.y != a.y);
    CHECK_THROWS_AS(cumulative_detection(m, { 0, 1 }), std::invalid_argument);
}

TEST_CASE("method sensitivity table") {
    auto m = from_triplets({ { 0, 0, 1 }, { 0, 1, 1 }, { 1, 0, 1 } }, 2, 2, { "a", "b" }, {});
    auto splits = split_by_method_replicate(m, { { "a", "plate", "1", std::nullopt }, { "b", "drop", "1", std::nullopt } });
    auto rows = method_sensitivity_table(splits);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].method == "drop");
    CHECK(rows[0].median_detected == 1);
    CHECK(rows[0].dropout == 0.5);
    CHECK(rows[1].median_detected == 2);
    CHECK(rows[1].dropout == 0);
}
