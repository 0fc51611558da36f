#pragma once

#include <Eigen/Core>

#include "mvcalib/geometry.hpp"

namespace mvcalib::numeric {

/// Dense row-count x column-count real matrix.
using Matrix = Eigen::MatrixXd;

/// Relative gap between the two smallest singular values below which the
/// minimizing direction of ||A v|| is considered non-unique.
inline constexpr double kRankGapTolerance = 1e-10;

/// Unit vector v minimizing ||A v||: the right-singular vector of the
/// smallest singular value. When A has fewer rows than columns the missing
/// singular values count as zero.
///
/// The sign is fixed so that the last component with magnitude above 1e-12
/// is positive.
///
/// Throws RankDeficient when the two smallest singular values are within
/// 1e-10 (relative to the largest) of each other, ShapeMismatch when
/// rows < cols - 1, NonFinite on NaN/Inf input.
Eigen::VectorXd solve_homogeneous(const Matrix& a);

/// Z minimizing ||b - A Z||_F. The minimum-norm solution is returned when
/// A is rank-deficient. Throws ShapeMismatch if the row counts differ or
/// A has fewer rows than columns.
Matrix solve_least_squares(const Matrix& a, const Matrix& b);

/// Closest proper rotation to `m` in the Frobenius norm: U V^T from the SVD
/// of m, with the column of U paired with the smallest singular value
/// negated when that is needed to make det = +1.
///
/// Throws Degenerate if the smallest singular value is below 1e-12.
Rotation3 nearest_rotation(const Eigen::Matrix3d& m);

/// Singular values of `a` in descending order.
Eigen::VectorXd singular_values(const Matrix& a);

}  // namespace mvcalib::numeric
