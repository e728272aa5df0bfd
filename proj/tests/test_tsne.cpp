#include <catch_amalgamated.hpp>

#include "helpers.hpp"
#include "scbench/parallel.hpp"
#include "scbench/tsne.hpp"

using namespace scbench;

namespace {

Eigen::MatrixXd three_groups(std::uint64_t seed, std::size_t per_group) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> z(0, 0.05);
    // Vertices of an equilateral simplex in three dimensions.
    Eigen::MatrixXd x(static_cast<Eigen::Index>(3 * per_group), 3);
    for (std::size_t g = 0; g < 3; ++g) {
        for (std::size_t i = 0; i < per_group; ++i) {
            auto r = static_cast<Eigen::Index>(g * per_group + i);
            for (Eigen::Index d = 0; d < 3; ++d) {
                x(r, d) = (d == static_cast<Eigen::Index>(g) ? 1.0 : 0.0) + z(gen);
            }
        }
    }
    return x;
}

}

TEST_CASE("calibration reaches the requested perplexity") {
    std::mt19937_64 gen(6);
    auto x = testing::to_eigen(oracle::random_points(gen, 80, 10));
    auto cal = calibrate_affinities(squared_euclidean_distances(x), 15);
    CHECK(cal.unconverged == 0);
    for (std::size_t i = 0; i < 80; ++i) {
        CHECK(std::abs(cal.achieved_perplexity[i] - 15) < 1e-4);
        double row = 0;
        for (std::size_t j = 0; j < 80; ++j) {
            row += cal.conditional(i, j);
        }
        CHECK(row == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(cal.conditional(i, i) == 0);
    }
    // Perplexity of the conditional from its entropy, computed here independently.
    for (std::size_t i = 0; i < 80; i += 17) {
        double h = 0;
        for (std::size_t j = 0; j < 80; ++j) {
            double p = cal.conditional(i, j);
            if (p > 0) {
                h -= p * std::log(p);
            }
        }
        CHECK(std::exp(h) == Catch::Approx(15).epsilon(1e-5));
    }
}

TEST_CASE("joint probabilities are symmetric and sum to one") {
    std::mt19937_64 gen(7);
    auto x = testing::to_eigen(oracle::random_points(gen, 30, 4));
    auto p = joint_probabilities(calibrate_affinities(squared_euclidean_distances(x), 5).conditional);
    double total = 0;
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) {
            CHECK(p(i, j) == p(j, i));
            total += p(i, j);
        }
    }
    CHECK(total == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kl divergence matches a direct evaluation") {
    std::mt19937_64 gen(8);
    auto x = testing::to_eigen(oracle::random_points(gen, 12, 3));
    auto p = joint_probabilities(calibrate_affinities(squared_euclidean_distances(x), 3).conditional);
    Eigen::MatrixXd y = testing::to_eigen(oracle::random_points(gen, 12, 2));
    double z = 0;
    for (Eigen::Index i = 0; i < 12; ++i) {
        for (Eigen::Index j = 0; j < 12; ++j) {
            if (i != j) {
                z += 1 / (1 + (y.row(i) - y.row(j)).squaredNorm());
            }
        }
    }
    double kl = 0;
    for (Eigen::Index i = 0; i < 12; ++i) {
        for (Eigen::Index j = 0; j < 12; ++j) {
            double pij = p(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
            if (i != j && pij > 0) {
                kl += pij * std::log(pij / (1 / (1 + (y.row(i) - y.row(j)).squaredNorm()) / z));
            }
        }
    }
    CHECK(kl_divergence(p, y) == Catch::Approx(kl).epsilon(1e-10));
}

TEST_CASE("kl divergence is zero when Q equals P and positive otherwise") {
    std::mt19937_64 gen(10);
    Eigen::MatrixXd y = testing::to_eigen(oracle::random_points(gen, 15, 2));
    SquareTable q{ 15, std::vector<double>(225, 0) };
    double z = 0;
    for (std::size_t i = 0; i < 15; ++i) {
        for (std::size_t j = 0; j < 15; ++j) {
            if (i != j) {
                q(i, j) = 1 / (1 + (y.row(static_cast<Eigen::Index>(i)) - y.row(static_cast<Eigen::Index>(j))).squaredNorm());
                z += q(i, j);
            }
        }
    }
    for (auto& v : q.values) {
        v /= z;
    }
    CHECK(std::abs(kl_divergence(q, y)) < 1e-9);
    Eigen::MatrixXd other = testing::to_eigen(oracle::random_points(gen, 15, 2));
    CHECK(kl_divergence(q, other) > 0);
    q.values[1] += 1e-3;
    CHECK_THROWS_AS(kl_divergence(q, y), DataError);
}

TEST_CASE("three equidistant groups stay roughly equidistant") {
    // Sixty points need a much smaller step than the default to settle the global layout.
    TsneOptions opt;
    opt.perplexity = 10;
    opt.learning_rate = 10;
    auto result = tsne(three_groups(1, 20), opt);
    const auto& y = result.embedding.coordinates;
    std::vector<Eigen::RowVectorXd> centre(3, Eigen::RowVectorXd::Zero(2));
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
        centre[static_cast<std::size_t>(i / 20)] += y.row(i) / 20;
    }
    double d01 = (centre[0] - centre[1]).norm(), d02 = (centre[0] - centre[2]).norm(), d12 = (centre[1] - centre[2]).norm();
    double lo = std::min({ d01, d02, d12 }), hi = std::max({ d01, d02, d12 });
    CHECK(hi / lo < 1.05);
    CHECK(result.kl_trace.size() == opt.iterations);
}

TEST_CASE("two separated clusters stay separated") {
    std::mt19937_64 gen(9);
    std::normal_distribution<double> z(0, 1);
    Eigen::MatrixXd x(80, 5);
    for (Eigen::Index i = 0; i < 80; ++i) {
        for (Eigen::Index d = 0; d < 5; ++d) {
            x(i, d) = z(gen) + (i < 40 ? 0.0 : 20.0);
        }
    }
    TsneOptions opt;
    opt.perplexity = 20;
    const auto y = tsne(x, opt).embedding.coordinates;
    double intra = 0, inter = std::numeric_limits<double>::infinity();
    std::size_t pairs = 0;
    for (Eigen::Index i = 0; i < 80; ++i) {
        for (Eigen::Index j = i + 1; j < 80; ++j) {
            double dist = (y.row(i) - y.row(j)).norm();
            if ((i < 40) == (j < 40)) {
                intra += dist;
                ++pairs;
            } else {
                inter = std::min(inter, dist);
            }
        }
    }
    CHECK(inter > 2 * intra / static_cast<double>(pairs));
}

TEST_CASE("t-SNE is seeded and thread independent") {
    auto x = three_groups(2, 15);
    TsneOptions opt;
    opt.perplexity = 8;
    opt.iterations = 300;
    opt.init = TsneInit::random;
    set_thread_count(1);
    auto a = tsne(x, opt);
    set_thread_count(3);
    auto b = tsne(x, opt);
    set_thread_count(0);
    CHECK(a.embedding.coordinates == b.embedding.coordinates);
    CHECK(a.kl_trace == b.kl_trace);
    opt.seed = 43;
    auto c = tsne(x, opt);
    CHECK(c.embedding.coordinates != a.embedding.coordinates);
}

TEST_CASE("t-SNE preconditions") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 3);
    TsneOptions opt;
    opt.perplexity = 3.4;
    CHECK_THROWS_AS(tsne(x, opt), std::invalid_argument);
    opt.perplexity = 3;
    CHECK_NOTHROW(tsne(x, opt));
    CHECK_THROWS(tsne(Eigen::MatrixXd::Random(3, 3), TsneOptions{ .perplexity = 0.5 }));
}
