#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "influence/embedding.hpp"
#include "oracles.hpp"

using namespace influence;

namespace {

FeatureMatrix matrix(const std::vector<std::vector<double>>& rows) {
    FeatureMatrix m;
    m.rows.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        m.row_ids.push_back("r" + std::to_string(i));
    }
    return m;
}

std::vector<std::vector<double>> random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    for (auto& r : rows)
        for (auto& v : r) v = g(rng);
    return rows;
}

}  // namespace

TEST(Pca, RankOneDataHasOneAxis) {
    std::vector<std::vector<double>> rows;
    for (int t = -3; t <= 4; ++t) rows.push_back({1.0 + 2.0 * t, -1.0 + t, 0.5 * t});
    const PcaModel p = fit_pca(matrix(rows), 1);
    EXPECT_NEAR(p.explained_variance[0] / p.total_variance, 1.0, 1e-12);
}

TEST(Pca, FullBasisExplainsEverything) {
    const auto m = matrix(random_rows(12, 5, 3));
    const PcaModel p = fit_pca(m, 5);
    double sum = 0;
    for (double v : p.explained_variance) sum += v;
    EXPECT_NEAR(sum, p.total_variance, 1e-8);
}

TEST(Pca, MatchesJacobiOracle) {
    const auto rows = random_rows(10, 6, 11);
    const PcaModel p = fit_pca(matrix(rows), 3);
    const auto eig = oracle::jacobi_eigen(oracle::covariance(rows));
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> v = eig[c].second;
        // Same sign rule: largest-magnitude entry positive.
        std::size_t arg = 0;
        for (std::size_t j = 1; j < v.size(); ++j)
            if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
        if (v[arg] < 0)
            for (auto& x : v) x = -x;
        EXPECT_NEAR(p.explained_variance[c], eig[c].first, 1e-8);
        for (std::size_t j = 0; j < 6; ++j)
            EXPECT_NEAR(p.components(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j)), v[j], 1e-6);
    }
}

TEST(Pca, ComponentsOrthonormalAndOrdered) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const PcaModel p = fit_pca(matrix(random_rows(15, 7, seed)), 7);
        const RowMatrix gram = p.components * p.components.transpose();
        EXPECT_TRUE(gram.isApprox(RowMatrix::Identity(7, 7), 1e-8) ||
                    (gram - RowMatrix::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-8);
        for (std::size_t i = 1; i < p.explained_variance.size(); ++i)
            EXPECT_LE(p.explained_variance[i], p.explained_variance[i - 1]);
    }
}

TEST(Pca, RoundTripAtFullRank) {
    const auto m = matrix(random_rows(9, 4, 5));
    const PcaModel p = fit_pca(m, 4);
    const RowMatrix back = inverse_transform_pca(p, transform_pca(p, m));
    EXPECT_LT((back - m.rows).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Pca, ProjectionsAreCentered) {
    const auto m = matrix(random_rows(20, 6, 8));
    const PcaModel p = fit_pca(m, 3);
    const FeatureMatrix r = transform_pca(p, m);
    EXPECT_EQ(r.row_ids, m.row_ids);
    for (Eigen::Index c = 0; c < 3; ++c) EXPECT_NEAR(r.rows.col(c).mean(), 0.0, 1e-8);
}

TEST(Pca, MeanRowMapsToZero) {
    const auto m = matrix(random_rows(8, 3, 2));
    const PcaModel p = fit_pca(m, 2);
    FeatureMatrix mean_row;
    mean_row.rows = RowMatrix(1, 3);
    for (Eigen::Index j = 0; j < 3; ++j) mean_row.rows(0, j) = p.mean[static_cast<std::size_t>(j)];
    mean_row.row_ids = {"mean"};
    const FeatureMatrix z = transform_pca(p, mean_row);
    EXPECT_NEAR(z.rows.cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Pca, SingleRowIsSignedDistanceAlongFirstAxis) {
    const auto rows = random_rows(8, 3, 4);
    const auto m = matrix(rows);
    const PcaModel p = fit_pca(m, 1);
    const FeatureMatrix z = transform_pca(p, matrix({rows[2]}));
    double dot = 0;
    for (std::size_t j = 0; j < 3; ++j) dot += (rows[2][j] - p.mean[j]) * p.components(0, static_cast<Eigen::Index>(j));
    EXPECT_NEAR(z.rows(0, 0), dot, 1e-12);
}

TEST(Pca, Errors) {
    const auto m = matrix(random_rows(4, 3, 1));
    EXPECT_THROW(fit_pca(m, 0), ValidationError);
    EXPECT_THROW(fit_pca(m, 4), ValidationError);
    EXPECT_THROW(fit_pca(matrix({{1, 2}, {1, 2}, {1, 2}}), 1), ComputationError);
}

TEST(Cosine, Examples) {
    const std::vector<double> e1{1, 0}, e2{0, 1}, d{1, 1};
    EXPECT_DOUBLE_EQ(cosine_similarity(e1, e1), 1.0);
    EXPECT_DOUBLE_EQ(cosine_similarity(e1, e2), 0.0);
    EXPECT_NEAR(cosine_similarity(d, e1), 0.70710678, 1e-8);
}

TEST(Cosine, ZeroNormAndMismatch) {
    const std::vector<double> z{0, 0}, a{1, 0}, b{1, 0, 0};
    EXPECT_THROW(cosine_similarity(z, a), ComputationError);
    EXPECT_THROW(cosine_similarity(a, b), ValidationError);
}

TEST(Cosine, SymmetricAndScaleInvariant) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> lambda(1e-3, 1e3);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> a(5), b(5);
        for (auto& v : a) v = g(rng);
        for (auto& v : b) v = g(rng);
        const double l = lambda(rng);
        std::vector<double> la = a;
        for (auto& v : la) v *= l;
        EXPECT_EQ(cosine_similarity(a, b), cosine_similarity(b, a));
        EXPECT_NEAR(cosine_similarity(la, b), cosine_similarity(a, b), 1e-12);
    }
}

TEST(Percentile, NearestRank) {
    const std::vector<double> v{7, 3, 1, 10, 2, 9, 4, 8, 6, 5};
    EXPECT_EQ(percentile_threshold(v, 90), 9.0);
    EXPECT_EQ(percentile_threshold(v, 99.9), 10.0);
    EXPECT_EQ(percentile_threshold(v, 0.1), 1.0);
    EXPECT_EQ(percentile_threshold(std::vector<double>(5, 2.5), 37), 2.5);
    EXPECT_EQ(percentile_threshold(std::vector<double>{4.0}, 90), 4.0);
    EXPECT_THROW(percentile_threshold(std::vector<double>{}, 50), ValidationError);
    EXPECT_THROW(percentile_threshold(v, 101), ValidationError);
    EXPECT_THROW(percentile_threshold(v, 0), ValidationError);
    EXPECT_THROW(percentile_threshold(v, 100), ValidationError);
}

TEST(Percentile, MemberAndMonotone) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    std::uniform_int_distribution<std::size_t> len(1, 60);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> v(len(rng));
        for (auto& x : v) x = u(rng);
        double prev = -2;
        for (double p = 0.5; p < 100; p += 2.5) {
            const double th = percentile_threshold(v, p);
            EXPECT_NE(std::find(v.begin(), v.end(), th), v.end());
            EXPECT_GE(th, prev);
            prev = th;
        }
    }
}
