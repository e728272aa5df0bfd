#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "scbench/pca.hpp"

using namespace scbench;

TEST_CASE("eigenvalues match a Jacobi solver") {
    std::mt19937_64 gen(2);
    for (int trial = 0; trial < 5; ++trial) {
        auto rows = oracle::random_points(gen, 40, 6);
        for (auto& r : rows) {
            r[1] += 2 * r[0];
            r[3] *= 3;
        }
        auto expected = oracle::jacobi_eigenvalues(oracle::covariance(rows));
        PcaOptions opt;
        opt.components = 6;
        auto result = pca_fit_transform(testing::to_eigen(rows), opt);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(result.model.explained_variance(static_cast<Eigen::Index>(i)) == Catch::Approx(expected[i]).epsilon(1e-10));
        }
        double total = 0;
        for (double v : expected) {
            total += v;
        }
        CHECK(result.model.total_variance == Catch::Approx(total).epsilon(1e-12));
        CHECK(result.model.explained_variance_ratio.sum() == Catch::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("scores are centred projections with a fixed sign") {
    std::mt19937_64 gen(3);
    auto x = testing::to_eigen(oracle::random_points(gen, 30, 4));
    auto result = pca_fit_transform(x, {});
    Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
    Eigen::MatrixXd expected = centred * result.model.components.transpose();
    CHECK((expected - result.embedding.coordinates).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index c = 0; c < result.model.components.rows(); ++c) {
        Eigen::Index arg;
        result.model.components.row(c).cwiseAbs().maxCoeff(&arg);
        CHECK(result.model.components(c, arg) > 0);
        CHECK(result.model.components.row(c).norm() == Catch::Approx(1.0));
    }
    CHECK(result.embedding.method == EmbeddingMethod::pca);
    CHECK(result.embedding.dims() == 2);
}

TEST_CASE("wide input uses the Gram path and agrees") {
    std::mt19937_64 gen(4);
    auto x = testing::to_eigen(oracle::random_points(gen, 10, 25));
    PcaOptions cov{ 5, PcaSolver::covariance }, gram{ 5, PcaSolver::gram };
    auto a = pca_fit_transform(x, cov), b = pca_fit_transform(x, gram);
    CHECK((a.embedding.coordinates - b.embedding.coordinates).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((a.model.explained_variance - b.model.explained_variance).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("row permutation and rotation invariance") {
    std::mt19937_64 gen(5);
    auto rows = oracle::random_points(gen, 40, 5);
    auto x = testing::to_eigen(rows);
    PcaOptions opt{ 3, PcaSolver::automatic };
    auto base = pca_fit_transform(x, opt);

    std::vector<int> order(40);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);
    Eigen::MatrixXd permuted(40, 5);
    for (int i = 0; i < 40; ++i) {
        permuted.row(i) = x.row(order[static_cast<std::size_t>(i)]);
    }
    auto p = pca_fit_transform(permuted, opt);
    for (int i = 0; i < 40; ++i) {
        CHECK((p.embedding.coordinates.row(i) - base.embedding.coordinates.row(order[static_cast<std::size_t>(i)])).cwiseAbs().maxCoeff() < 1e-8);
    }

    Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(testing::to_eigen(oracle::random_points(gen, 5, 5))).householderQ();
    auto rotated = pca_fit_transform(Eigen::MatrixXd(x * q), opt);
    CHECK((rotated.model.explained_variance - base.model.explained_variance).cwiseAbs().maxCoeff() < 1e-8);
    Eigen::MatrixXd gram = base.model.components * base.model.components.transpose();
    CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("points on a line") {
    Eigen::MatrixXd x(5, 2);
    x << 0, 0, 1, 1, 2, 2, 3, 3, -4, -4;
    auto result = pca_fit_transform(x, {});
    CHECK(result.model.components(0, 0) == Catch::Approx(1 / std::sqrt(2.0)));
    CHECK(result.model.components(0, 1) == Catch::Approx(1 / std::sqrt(2.0)));
    CHECK(result.model.explained_variance_ratio(0) == Catch::Approx(1.0));
    CHECK(result.model.explained_variance_ratio(1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("pca argument checks") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 3);
    CHECK_THROWS_AS(pca_fit_transform(x, { 0, PcaSolver::automatic }), std::invalid_argument);
    CHECK_THROWS_AS(pca_fit_transform(x, { 4, PcaSolver::automatic }), std::invalid_argument);
    CHECK_THROWS_AS(pca_fit_transform(Eigen::MatrixXd::Random(1, 3), {}), DataError);
    x(0, 0) = std::nan("");
    CHECK_THROWS_AS(pca_fit_transform(x, {}), DataError);
}
