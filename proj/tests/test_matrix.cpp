#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "scbench/matrix.hpp"

using namespace scbench;

TEST_CASE("from_triplets stores gene-major without zeros") {
    auto m = from_triplets({ { 2, 1, 5 }, { 0, 0, 3 }, { 1, 1, 0 }, { 1, 0, 7 } }, 3, 2);
    CHECK(m.n_cells() == 3);
    CHECK(m.n_genes() == 2);
    CHECK(m.nnz() == 3);
    CHECK(m.at(0, 0) == 3);
    CHECK(m.at(1, 0) == 7);
    CHECK(m.at(2, 1) == 5);
    CHECK(m.at(1, 1) == 0);
    REQUIRE(m.cells_of(0).size() == 2);
    CHECK(m.cells_of(0)[0] == 0);
    CHECK(m.cells_of(0)[1] == 1);
    CHECK(m.cell_ids() == std::vector<std::string>{ "cell_0", "cell_1", "cell_2" });
    CHECK(m.gene_ids() == std::vector<std::string>{ "gene_0", "gene_1" });
}

TEST_CASE("from_triplets rejects bad input") {
    CHECK_THROWS_AS(from_triplets({ { 0, 0, 1 }, { 0, 0, 2 } }, 1, 1), DataError);
    CHECK_THROWS_AS(from_triplets({ { 3, 0, 1 } }, 2, 1), DataError);
    CHECK_THROWS_AS(from_triplets({ { 0, 0, std::uint64_t{ 1 } << 32 } }, 1, 1), DataError);
    CHECK_THROWS(from_triplets({}, 2, 1, { "a" }, {}));
}

TEST_CASE("cell-major view agrees with at()") {
    std::mt19937_64 gen(7);
    auto counts = oracle::random_counts(gen, 13, 9, 0.6);
    auto m = testing::to_matrix(counts, 9);
    auto view = m.by_cell();
    for (std::size_t c = 0; c < 13; ++c) {
        std::vector<std::uint32_t> row(9, 0);
        auto genes = view.genes_of(c);
        auto values = view.counts_of(c);
        for (std::size_t k = 0; k < genes.size(); ++k) {
            row[genes[k]] = values[k];
        }
        CHECK(row == counts[c]);
    }
}

TEST_CASE("submatrix matches brute-force masking") {
    std::mt19937_64 gen(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto counts = oracle::random_counts(gen, 17, 12, 0.5);
        auto m = testing::to_matrix(counts, 12);
        std::vector<bool> cm(17), gm(12);
        for (std::size_t i = 0; i < 17; ++i) {
            cm[i] = gen() % 2;
        }
        for (std::size_t i = 0; i < 12; ++i) {
            gm[i] = gen() % 3 != 0;
        }
        auto sub = submatrix(m, cm, gm);
        oracle::DenseCounts expected;
        std::vector<std::string> cells, genes;
        for (std::size_t c = 0; c < 17; ++c) {
            if (!cm[c]) {
                continue;
            }
            cells.push_back("cell_" + std::to_string(c));
            std::vector<std::uint32_t> row;
            for (std::size_t g = 0; g < 12; ++g) {
                if (gm[g]) {
                    row.push_back(counts[c][g]);
                }
            }
            expected.push_back(row);
        }
        for (std::size_t g = 0; g < 12; ++g) {
            if (gm[g]) {
                genes.push_back("gene_" + std::to_string(g));
            }
        }
        REQUIRE(sub.n_cells() == expected.size());
        CHECK(sub.cell_ids() == cells);
        CHECK(sub.gene_ids() == genes);
        for (std::size_t c = 0; c < expected.size(); ++c) {
            for (std::size_t g = 0; g < genes.size(); ++g) {
                CHECK(sub.at(c, g) == expected[c][g]);
            }
        }
    }
}

TEST_CASE("gene statistics include implicit zeros") {
    // One gene with counts 0, 0, 4.
    auto m = from_triplets({ { 2, 0, 4 } }, 3, 1);
    auto s = gene_stats(m);
    CHECK(s.nonzero_cell_count[0] == 1);
    CHECK(s.mean[0] == Catch::Approx(4.0 / 3));
    CHECK(s.standard_deviation[0] == Catch::Approx(std::sqrt(32.0 / 9)));
    CHECK(s.cv[0] == Catch::Approx(std::sqrt(2.0)));
    CHECK(gene_nonzero_fraction(m)[0] == Catch::Approx(1.0 / 3));
}

TEST_CASE("all-zero gene has cv 0") {
    auto m = from_triplets({ { 0, 1, 2 } }, 2, 2);
    auto s = gene_stats(m);
    CHECK(s.mean[0] == 0);
    CHECK(s.cv[0] == 0);
}

TEST_CASE("dense round trip and budget") {
    std::mt19937_64 gen(3);
    auto m = testing::to_matrix(oracle::random_counts(gen, 6, 5, 0.4), 5);
    auto dense = to_dense(m);
    CHECK(dense.values.rows() == 6);
    CHECK(dense.values.cols() == 5);
    CHECK(from_dense(dense) == m);
    CHECK_THROWS_AS(to_dense(m, 10), DataError);
}
