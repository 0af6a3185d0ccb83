#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include "influence/clustering.hpp"

using namespace influence;

namespace {

FeatureMatrix two_blobs(std::size_t per_blob, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.1);
    FeatureMatrix m;
    m.rows.resize(static_cast<Eigen::Index>(2 * per_blob), 2);
    for (std::size_t i = 0; i < 2 * per_blob; ++i) {
        const double cx = i < per_blob ? 0.0 : 10.0;
        m.rows(static_cast<Eigen::Index>(i), 0) = cx + g(rng);
        m.rows(static_cast<Eigen::Index>(i), 1) = g(rng);
        m.row_ids.push_back("p" + std::to_string(i));
    }
    return m;
}

FeatureMatrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    FeatureMatrix m;
    m.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < m.rows.rows(); ++i)
        for (Eigen::Index j = 0; j < m.rows.cols(); ++j) m.rows(i, j) = g(rng);
    for (std::size_t i = 0; i < n; ++i) m.row_ids.push_back("r" + std::to_string(i));
    return m;
}

FeatureMatrix subset(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
    FeatureMatrix s;
    s.rows.resize(static_cast<Eigen::Index>(rows.size()), m.rows.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        s.rows.row(static_cast<Eigen::Index>(i)) = m.rows.row(static_cast<Eigen::Index>(rows[i]));
        s.row_ids.push_back(m.row_ids[rows[i]]);
    }
    return s;
}

// Exhaustive minimum-SSE 2-partition; returns block membership (row 0 in block 0).
std::vector<int> brute_force_two_means(const FeatureMatrix& m) {
    const std::size_t n = m.size();
    double best = 1e300;
    std::vector<int> best_labels;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
        std::vector<int> labels(n, 0);
        for (std::size_t i = 1; i < n; ++i) labels[i] = (mask >> (i - 1)) & 1;
        double sse = 0;
        for (int b = 0; b < 2; ++b) {
            Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(m.rows.cols());
            int count = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (labels[i] == b) {
                    mean += m.rows.row(static_cast<Eigen::Index>(i));
                    ++count;
                }
            mean /= count;
            for (std::size_t i = 0; i < n; ++i)
                if (labels[i] == b) sse += (m.rows.row(static_cast<Eigen::Index>(i)) - mean).squaredNorm();
        }
        if (sse < best) {
            best = sse;
            best_labels = labels;
        }
    }
    return best_labels;
}

bool same_blocks(const std::vector<int>& a, const std::vector<int>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if ((a[i] == a[j]) != (b[i] == b[j])) return false;
    return true;
}

ClusterAssignment with_sizes(const std::vector<std::size_t>& sizes) {
    ClusterAssignment a;
    a.centroids.resize(static_cast<Eigen::Index>(sizes.size()), 1);
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        a.centroids(static_cast<Eigen::Index>(c), 0) = static_cast<double>(c);
        a.cluster_inertia.push_back(static_cast<double>(c + 1));
        for (std::size_t i = 0; i < sizes[c]; ++i) a.labels.push_back(static_cast<int>(c));
    }
    a.inertia = 0;
    for (double v : a.cluster_inertia) a.inertia += v;
    return a;
}

}  // namespace

TEST(KMeans, RecoversSeparatedBlobs) {
    const FeatureMatrix m = two_blobs(20, 1);
    const ClusterAssignment a = kmeans(m, 2);
    std::vector<int> truth;
    for (std::size_t i = 0; i < 40; ++i) truth.push_back(i < 20 ? 0 : 1);
    EXPECT_TRUE(same_blocks(a.labels, truth));

    const std::vector<std::size_t> pick{0, 3, 7, 11, 19, 20, 22, 28, 33, 39};
    const FeatureMatrix s = subset(m, pick);
    const auto oracle = brute_force_two_means(s);
    const ClusterAssignment as = kmeans(s, 2);
    EXPECT_TRUE(same_blocks(as.labels, oracle));
    std::vector<int> sub_truth;
    for (std::size_t i : pick) sub_truth.push_back(truth[i]);
    EXPECT_TRUE(same_blocks(oracle, sub_truth));
}

TEST(KMeans, SingletonsWhenKEqualsN) {
    const FeatureMatrix m = random_matrix(7, 3, 2);
    const ClusterAssignment a = kmeans(m, 7);
    EXPECT_EQ(a.inertia, 0.0);
    std::set<int> distinct(a.labels.begin(), a.labels.end());
    EXPECT_EQ(distinct.size(), 7u);
}

TEST(KMeans, SeedDeterministic) {
    const FeatureMatrix m = random_matrix(60, 4, 3);
    const ClusterAssignment a = kmeans(m, 5, {.seed = 9});
    const ClusterAssignment b = kmeans(m, 5, {.seed = 9});
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.inertia, b.inertia);
}

TEST(KMeans, CentroidsAreMemberMeans) {
    const FeatureMatrix m = random_matrix(80, 3, 4);
    const ClusterAssignment a = kmeans(m, 6);
    for (Eigen::Index c = 0; c < a.centroids.rows(); ++c) {
        Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
        int count = 0;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (a.labels[i] == c) {
                mean += m.rows.row(static_cast<Eigen::Index>(i));
                ++count;
            }
        ASSERT_GT(count, 0);
        mean /= count;
        EXPECT_LT((mean - a.centroids.row(c)).cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(KMeans, InertiaNonIncreasingBetweenStableIterations) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const FeatureMatrix m = random_matrix(50, 3, 100 + seed);
        const ClusterAssignment a = kmeans(m, 4, {.seed = seed});
        for (std::size_t i = 1; i < a.inertia_history.size(); ++i) {
            if (a.reseeded[i - 1]) continue;
            EXPECT_LE(a.inertia_history[i], a.inertia_history[i - 1] * (1 + 1e-12));
        }
        EXPECT_LE(a.inertia, a.inertia_history.back() * (1 + 1e-12));
    }
}

TEST(KMeans, DuplicatePointsForceReseed) {
    // Five identical points and k = 3: every cluster but one starts empty.
    FeatureMatrix m;
    m.rows = RowMatrix::Ones(5, 2);
    m.rows(4, 0) = 3.0;
    for (int i = 0; i < 5; ++i) m.row_ids.push_back("d" + std::to_string(i));
    const ClusterAssignment a = kmeans(m, 3);
    EXPECT_EQ(a.labels.size(), 5u);
    EXPECT_EQ(a.cluster_count(), 3u);
}

TEST(KMeans, RejectsBadK) {
    const FeatureMatrix m = random_matrix(4, 2, 1);
    EXPECT_THROW(kmeans(m, 0), ValidationError);
    EXPECT_THROW(kmeans(m, 5), ValidationError);
}

TEST(Consolidate, SmallClustersBecomeOther) {
    const ClusterAssignment out = consolidate_small(with_sizes({5, 2, 1}), 3);
    EXPECT_EQ(out.cluster_count(), 1u);
    EXPECT_EQ(std::count(out.labels.begin(), out.labels.end(), 0), 5);
    EXPECT_EQ(std::count(out.labels.begin(), out.labels.end(), kOtherCluster), 3);
    EXPECT_EQ(out.inertia, 1.0);
}

TEST(Consolidate, NoOpOnlyRenumbers) {
    const ClusterAssignment in = with_sizes({4, 6, 5});
    const ClusterAssignment out = consolidate_small(in, 3);
    EXPECT_EQ(out.cluster_count(), 3u);
    // Descending size: old 1 -> 0, old 2 -> 1, old 0 -> 2.
    const std::vector<int> remap{2, 0, 1};
    for (std::size_t i = 0; i < in.labels.size(); ++i)
        EXPECT_EQ(out.labels[i], remap[static_cast<std::size_t>(in.labels[i])]);
    EXPECT_EQ(out.centroids(0, 0), 1.0);
    EXPECT_EQ(out.inertia, in.inertia);
}

TEST(Consolidate, AllSmallGivesAllOther) {
    const ClusterAssignment out = consolidate_small(with_sizes({3, 2, 1}), 3);
    EXPECT_EQ(out.cluster_count(), 0u);
    for (int l : out.labels) EXPECT_EQ(l, kOtherCluster);
    EXPECT_EQ(out.inertia, 0.0);
}

TEST(Consolidate, Idempotent) {
    const FeatureMatrix m = random_matrix(40, 2, 5);
    const ClusterAssignment once = consolidate_small(kmeans(m, 8), 4);
    const ClusterAssignment twice = consolidate_small(once, 4);
    EXPECT_EQ(once.labels, twice.labels);
    EXPECT_EQ(once.centroids, twice.centroids);
    EXPECT_EQ(once.inertia, twice.inertia);
}

TEST(Exemplars, NearestThreePerCluster) {
    const FeatureMatrix m = two_blobs(5, 7);
    const ClusterAssignment a = kmeans(m, 2);
    const auto ex = cluster_exemplars(m, a, 3);
    ASSERT_EQ(ex.size(), 6u);
    for (const auto& e : ex) {
        EXPECT_EQ(a.labels[e.row], e.cluster);
        // No non-exemplar member is strictly nearer than the rank-3 exemplar.
        if (e.rank != 3) continue;
        const double d3 = (m.rows.row(static_cast<Eigen::Index>(e.row)) - a.centroids.row(e.cluster)).squaredNorm();
        int nearer = 0;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (a.labels[i] == e.cluster &&
                (m.rows.row(static_cast<Eigen::Index>(i)) - a.centroids.row(e.cluster)).squaredNorm() < d3)
                ++nearer;
        EXPECT_EQ(nearer, 2);
    }
}
