#pragma once

// Numeric kernels: PCA reduction, cosine similarity and nearest-rank
// percentile thresholds.

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "influence/error.hpp"
#include "influence/feature_matrix.hpp"

namespace influence {

struct PcaModel {
    Eigen::VectorXd mean;                ///< d
    RowMatrix components;                ///< k x d, rows are orthonormal principal axes
    Eigen::VectorXd explained_variance;  ///< k, non-increasing
    double total_variance = 0.0;         ///< trace of the covariance matrix

    std::size_t input_dim() const noexcept { return static_cast<std::size_t>(components.cols()); }
    std::size_t output_dim() const noexcept { return static_cast<std::size_t>(components.rows()); }
};

/// Flips the sign of each row so that its largest-magnitude entry is
/// positive (first such entry on ties).
inline void canonicalize_axis_signs(RowMatrix& axes) {
    for (Eigen::Index r = 0; r < axes.rows(); ++r) {
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index c = 0; c < axes.cols(); ++c) {
            const double a = std::abs(axes(r, c));
            if (a > best_abs) {
                best_abs = a;
                best = c;
            }
        }
        if (axes(r, best) < 0.0) axes.row(r) *= -1.0;
    }
}

/// Top-k principal axes of the mean-centred rows, from an eigendecomposition
/// of the sample covariance matrix (divisor n - 1).
inline PcaModel fit_pca(const FeatureMatrix& m, std::size_t k) {
    validate(m);
    const std::size_t n = m.size();
    const std::size_t d = m.dim();
    if (n < 2) throw ValidationError("fit_pca needs at least 2 rows, got " + std::to_string(n));
    if (k < 1 || k > std::min(n, d))
        throw ValidationError("fit_pca: k = " + std::to_string(k) + " out of range [1, min(n, d) = " +
                              std::to_string(std::min(n, d)) + "]");

    PcaModel model;
    model.mean = m.rows.colwise().mean().transpose();
    const Eigen::MatrixXd centered = m.rows.rowwise() - model.mean.transpose();
    if (centered.squaredNorm() == 0.0)
        throw ComputationError("fit_pca: zero-variance input (all rows identical)");

    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    model.total_variance = cov.trace();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) throw ComputationError("fit_pca: covariance eigendecomposition failed");

    // Eigen returns ascending eigenvalues; take the last k in reverse.
    const auto kk = static_cast<Eigen::Index>(k);
    const auto dd = static_cast<Eigen::Index>(d);
    model.components.resize(kk, dd);
    model.explained_variance.resize(kk);
    for (Eigen::Index i = 0; i < kk; ++i) {
        const Eigen::Index src = dd - 1 - i;
        model.components.row(i) = eig.eigenvectors().col(src).transpose();
        model.explained_variance(i) = std::max(0.0, eig.eigenvalues()(src));
    }
    canonicalize_axis_signs(model.components);
    return model;
}

/// Projects mean-centred rows onto the model's axes. Row ids are preserved.
inline FeatureMatrix transform_pca(const PcaModel& model, const FeatureMatrix& m) {
    validate(m);
    if (m.dim() != model.input_dim())
        throw ValidationError("transform_pca: matrix has dimension " + std::to_string(m.dim()) +
                              " but the model expects " + std::to_string(model.input_dim()));
    FeatureMatrix out;
    out.rows = (m.rows.rowwise() - model.mean.transpose()) * model.components.transpose();
    out.row_ids = m.row_ids;
    return out;
}

/// Maps reduced rows back into the input space.
inline RowMatrix inverse_transform_pca(const PcaModel& model, const FeatureMatrix& reduced) {
    RowMatrix back = reduced.rows * model.components;
    back.rowwise() += model.mean.transpose();
    return back;
}

inline double norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

/// Cosine similarity given precomputed norms. Both norms must be non-zero.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b, double norm_a,
                                double norm_b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ValidationError("cosine_similarity: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) throw ComputationError("cosine_similarity: undefined for a zero-norm vector");
    return cosine_similarity(a, b, na, nb);
}

/// Zero-based index of the nearest-rank p-th percentile in a sorted list of
/// n values: ceil(p/100 * n) - 1.
inline std::size_t nearest_rank_index(std::size_t n, double p) {
    const double rank = std::ceil(p * static_cast<double>(n) / 100.0);
    const auto r = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(n)));
    return r - 1;
}

/// Nearest-rank percentile computed in place; reorders `values`.
inline double select_percentile(std::vector<double>& values, double p) {
    if (values.empty()) throw ValidationError("percentile_threshold: empty input");
    if (!(p > 0.0 && p < 100.0))
        throw ValidationError("percentile_threshold: p must lie in (0, 100), got " + std::to_string(p));
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("percentile_threshold: non-finite value");
    const std::size_t idx = nearest_rank_index(values.size(), p);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
    return values[idx];
}

/// Nearest-rank percentile; the result is always one of `values`.
inline double percentile_threshold(std::span<const double> values, double p) {
    std::vector<double> scratch(values.begin(), values.end());
    return select_percentile(scratch, p);
}

}  // namespace influence
