#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "influence/error.hpp"

namespace influence {

/// Row-major so that each artwork's vector is contiguous and can be viewed
/// as a std::span.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n x d feature vectors with the artwork id of every row.
struct FeatureMatrix {
    RowMatrix rows;
    std::vector<std::string> row_ids;

    std::size_t size() const noexcept { return static_cast<std::size_t>(rows.rows()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(rows.cols()); }

    std::span<const double> row(std::size_t i) const noexcept {
        return {rows.data() + i * dim(), dim()};
    }
};

/// Throws ValidationError unless the matrix is non-empty, finite and aligned
/// with its id list.
inline void validate(const FeatureMatrix& m) {
    if (m.rows.rows() < 1 || m.rows.cols() < 1)
        throw ValidationError("feature matrix must have at least one row and one column");
    if (m.row_ids.size() != m.size())
        throw ValidationError("feature matrix has " + std::to_string(m.size()) + " rows but " +
                              std::to_string(m.row_ids.size()) + " row ids");
    if (!m.rows.allFinite()) throw ValidationError("feature matrix contains non-finite values");
}

}  // namespace influence
