#include "mvcalib/numeric.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "mvcalib/errors.hpp"

namespace mvcalib::numeric {
namespace {

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
  }
}

}  // namespace

Eigen::VectorXd solve_homogeneous(const Matrix& a) {
  require_finite(a, "homogeneous system");
  const Eigen::Index cols = a.cols();
  if (cols < 1 || a.rows() < cols - 1) {
    throw Error(ErrorCode::ShapeMismatch,
                "homogeneous system needs at least cols - 1 rows");
  }

  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);

  // Pad to one singular value per column; absent ones are exactly zero.
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(cols);
  sigma.head(svd.singularValues().size()) = svd.singularValues();

  if (cols >= 2) {
    const double largest = sigma(0);
    const double gap = sigma(cols - 2) - sigma(cols - 1);
    if (!(largest > 0.0) || gap <= kRankGapTolerance * largest) {
      throw Error(ErrorCode::RankDeficient,
                  "two smallest singular values coincide; null direction is not unique");
    }
  }

  Eigen::VectorXd v = svd.matrixV().col(cols - 1);
  v.normalize();
  for (Eigen::Index i = cols - 1; i >= 0; --i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      break;
    }
  }
  return v;
}

Matrix solve_least_squares(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "A and b have different row counts");
  }
  if (a.rows() < a.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "least-squares system is underdetermined");
  }
  require_finite(a, "A");
  require_finite(b, "b");
  return a.completeOrthogonalDecomposition().solve(b);
}

Rotation3 nearest_rotation(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFinite, "rotation candidate has non-finite entries");
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(2) < 1e-12) {
    throw Error(ErrorCode::Degenerate, "matrix is singular; no well-defined rotation");
  }
  Eigen::Matrix3d u = svd.matrixU();
  const Eigen::Matrix3d& v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) {
    u.col(2) = -u.col(2);
  }
  return Rotation3(u * v.transpose());
}

Eigen::VectorXd singular_values(const Matrix& a) {
  require_finite(a, "matrix");
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

}  // namespace mvcalib::numeric
