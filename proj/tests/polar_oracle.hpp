#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

namespace mvcalib::testing {

// Orthogonal polar factor of a nonsingular matrix by Newton iteration
// X <- (X + X^-T) / 2. No SVD involved, so it checks numeric::nearest_rotation
// independently. For det(m) > 0 the factor is the closest rotation.
inline Eigen::Matrix3d polar_factor(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d x = m;
  for (int it = 0; it < 100; ++it) {
    const Eigen::Matrix3d next = 0.5 * (x + x.inverse().transpose());
    const double step = (next - x).norm();
    x = next;
    if (step < 1e-15) break;
  }
  return x;
}

}  // namespace mvcalib::testing
