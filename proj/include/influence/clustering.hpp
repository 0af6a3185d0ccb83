#pragma once

// k-means style clustering and consolidation of small clusters into a
// reserved OTHER label.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "influence/error.hpp"
#include "influence/feature_matrix.hpp"

namespace influence {

inline constexpr int kOtherCluster = -1;

struct ClusterAssignment {
    std::vector<int> labels;  ///< per row; kOtherCluster or an index into centroids
    RowMatrix centroids;      ///< one row per surviving cluster
    double inertia = 0.0;     ///< sum of squared distances to the assigned centroid (OTHER rows excluded)
    std::vector<double> cluster_inertia;  ///< per surviving cluster; sums to inertia

    /// Inertia after each assignment step and whether that iteration had to
    /// reseed an empty cluster. Filled by kmeans only.
    std::vector<double> inertia_history;
    std::vector<bool> reseeded;
    int iterations = 0;

    std::size_t cluster_count() const noexcept { return static_cast<std::size_t>(centroids.rows()); }

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> out(cluster_count(), 0);
        for (int l : labels)
            if (l != kOtherCluster) ++out[static_cast<std::size_t>(l)];
        return out;
    }
};

struct KMeansOptions {
    std::uint64_t seed = 42;
    int max_iter = 300;
    double tol = 1e-6;
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; unlike
/// std::uniform_real_distribution this is identical on every standard library.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double squared_distance(std::span<const double> a, const RowMatrix& centroids, Eigen::Index c) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - centroids(c, static_cast<Eigen::Index>(j));
        s += diff * diff;
    }
    return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        s += diff * diff;
    }
    return s;
}

/// k-means++ seeding.
inline RowMatrix kmeans_plus_plus(const FeatureMatrix& m, std::size_t k, std::mt19937_64& rng) {
    const std::size_t n = m.size();
    RowMatrix centers(static_cast<Eigen::Index>(k), m.rows.cols());
    std::vector<char> chosen(n, 0);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());

    std::size_t first = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
    first = std::min(first, n - 1);
    centers.row(0) = m.rows.row(static_cast<Eigen::Index>(first));
    chosen[first] = 1;

    for (std::size_t c = 1; c < k; ++c) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            best[i] = std::min(best[i], squared_distance(m.row(i), centers, static_cast<Eigen::Index>(c - 1)));
            if (!chosen[i]) total += best[i];
        }
        std::size_t pick = n;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (chosen[i]) continue;
                acc += best[i];
                if (acc > target && best[i] > 0.0) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {
                // Rounding left the target past the last mass; take the last candidate.
                for (std::size_t i = n; i-- > 0;)
                    if (!chosen[i] && best[i] > 0.0) {
                        pick = i;
                        break;
                    }
            }
        } else {
            // Remaining points all coincide with chosen centers.
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < n; ++i)
                if (!chosen[i]) free.push_back(i);
            pick = free[std::min(free.size() - 1,
                                 static_cast<std::size_t>(uniform01(rng) * static_cast<double>(free.size())))];
        }
        centers.row(static_cast<Eigen::Index>(c)) = m.rows.row(static_cast<Eigen::Index>(pick));
        chosen[pick] = 1;
    }
    return centers;
}

/// Nearest centroid for every row (lowest index on ties); returns inertia.
inline double assign_nearest(const FeatureMatrix& m, const RowMatrix& centroids, std::vector<int>& labels,
                             std::vector<double>& dist) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto row = m.row(i);
        int best = 0;
        double best_d = squared_distance(row, centroids, 0);
        for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
            const double dc = squared_distance(row, centroids, c);
            if (dc < best_d) {
                best_d = dc;
                best = static_cast<int>(c);
            }
        }
        labels[i] = best;
        dist[i] = best_d;
        inertia += best_d;
    }
    return inertia;
}

inline std::vector<double> cluster_inertia(const FeatureMatrix& m, const RowMatrix& centroids,
                                           const std::vector<int>& labels) {
    std::vector<double> s(static_cast<std::size_t>(centroids.rows()), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        if (labels[i] != kOtherCluster)
            s[static_cast<std::size_t>(labels[i])] += squared_distance(m.row(i), centroids, labels[i]);
    return s;
}

}  // namespace detail

/// Lloyd iterations from a seeded k-means++ start. Stops when no centroid
/// moves by tol or more (Euclidean), or after max_iter iterations.
///
/// A cluster that ends up empty is reseeded at the point farthest from its
/// own centroid (lowest index on ties); the iteration is flagged in
/// `reseeded`.
inline ClusterAssignment kmeans(const FeatureMatrix& m, std::size_t k, const KMeansOptions& options = {}) {
    if (m.size() == 0) throw ValidationError("kmeans: empty matrix");
    validate(m);
    if (k < 1 || k > m.size())
        throw ValidationError("kmeans: k = " + std::to_string(k) + " must lie in [1, n = " +
                              std::to_string(m.size()) + "]");
    if (options.max_iter < 1) throw ValidationError("kmeans: max_iter must be >= 1");
    if (!(options.tol > 0.0)) throw ValidationError("kmeans: tol must be > 0");

    const std::size_t n = m.size();
    const auto kk = static_cast<Eigen::Index>(k);
    std::mt19937_64 rng(options.seed);

    ClusterAssignment out;
    out.centroids = detail::kmeans_plus_plus(m, k, rng);
    out.labels.assign(n, 0);
    std::vector<double> dist(n, 0.0);

    for (int iter = 0; iter < options.max_iter; ++iter) {
        const double inertia = detail::assign_nearest(m, out.centroids, out.labels, dist);
        out.inertia_history.push_back(inertia);
        out.iterations = iter + 1;

        RowMatrix next = RowMatrix::Zero(kk, m.rows.cols());
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            next.row(out.labels[i]) += m.rows.row(static_cast<Eigen::Index>(i));
            ++counts[static_cast<std::size_t>(out.labels[i])];
        }
        bool reseeded = false;
        std::vector<char> taken(n, 0);
        for (Eigen::Index c = 0; c < kk; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                next.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
                continue;
            }
            std::size_t far = n;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i] && (far == n || dist[i] > dist[far])) far = i;
            taken[far] = 1;
            next.row(c) = m.rows.row(static_cast<Eigen::Index>(far));
            reseeded = true;
        }
        out.reseeded.push_back(reseeded);

        double shift = 0.0;
        for (Eigen::Index c = 0; c < kk; ++c) shift = std::max(shift, (next.row(c) - out.centroids.row(c)).norm());
        out.centroids = std::move(next);
        if (!reseeded && shift < options.tol) break;
    }

    // Centroids are the means of the last assignment; report inertia against them.
    out.cluster_inertia = detail::cluster_inertia(m, out.centroids, out.labels);
    out.inertia = std::accumulate(out.cluster_inertia.begin(), out.cluster_inertia.end(), 0.0);
    return out;
}

/// Relabels every cluster with at most `min_size` members as OTHER and
/// renumbers the survivors 0..m-1 by descending size (ties by old label).
inline ClusterAssignment consolidate_small(const ClusterAssignment& assignment, std::size_t min_size) {
    const auto sizes = assignment.sizes();
    std::vector<int> survivors;
    for (std::size_t c = 0; c < sizes.size(); ++c)
        if (sizes[c] > min_size) survivors.push_back(static_cast<int>(c));
    std::stable_sort(survivors.begin(), survivors.end(),
                     [&](int a, int b) { return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)]; });

    std::vector<int> remap(sizes.size(), kOtherCluster);
    ClusterAssignment out;
    out.centroids.resize(static_cast<Eigen::Index>(survivors.size()), assignment.centroids.cols());
    for (std::size_t r = 0; r < survivors.size(); ++r) {
        remap[static_cast<std::size_t>(survivors[r])] = static_cast<int>(r);
        out.centroids.row(static_cast<Eigen::Index>(r)) = assignment.centroids.row(survivors[r]);
    }
    out.labels.reserve(assignment.labels.size());
    for (int l : assignment.labels) out.labels.push_back(l == kOtherCluster ? kOtherCluster : remap[static_cast<std::size_t>(l)]);

    out.cluster_inertia.reserve(survivors.size());
    for (int c : survivors) out.cluster_inertia.push_back(assignment.cluster_inertia[static_cast<std::size_t>(c)]);
    out.inertia = std::accumulate(out.cluster_inertia.begin(), out.cluster_inertia.end(), 0.0);
    out.iterations = assignment.iterations;
    return out;
}

struct Exemplar {
    int cluster = 0;
    int rank = 0;  ///< 1 = nearest to the centroid
    std::size_t row = 0;
};

/// The `per_cluster` rows nearest each surviving centroid (ties by row index).
inline std::vector<Exemplar> cluster_exemplars(const FeatureMatrix& m, const ClusterAssignment& assignment,
                                               std::size_t per_cluster = 3) {
    std::vector<Exemplar> out;
    for (Eigen::Index c = 0; c < assignment.centroids.rows(); ++c) {
        std::vector<std::pair<double, std::size_t>> members;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (assignment.labels[i] == static_cast<int>(c))
                members.emplace_back(detail::squared_distance(m.row(i), assignment.centroids, c), i);
        std::sort(members.begin(), members.end());
        for (std::size_t r = 0; r < std::min(per_cluster, members.size()); ++r)
            out.push_back({static_cast<int>(c), static_cast<int>(r + 1), members[r].second});
    }
    return out;
}

}  // namespace influence
