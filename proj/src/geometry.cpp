#include "mvcalib/geometry.hpp"

#include <cmath>

#include <Eigen/LU>

#include "mvcalib/errors.hpp"

namespace mvcalib {

bool is_finite(const Point3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

bool is_finite(const Point2& p) { return std::isfinite(p.u) && std::isfinite(p.v); }

bool is_rotation(const Eigen::Matrix3d& m, double tolerance) {
  if (!m.allFinite()) return false;
  const double ortho = (m.transpose() * m - Eigen::Matrix3d::Identity()).norm();
  return ortho <= tolerance && std::abs(m.determinant() - 1.0) <= tolerance;
}

Rotation3::Rotation3(const Eigen::Matrix3d& m) : m_(m) {
  if (!is_rotation(m)) {
    throw Error(ErrorCode::InvalidRotation,
                "matrix is not a proper rotation within 1e-9");
  }
}

Rotation3 Rotation3::transposed() const {
  Rotation3 r;
  r.m_ = m_.transpose();
  return r;
}

double Rotation3::orthogonality_error() const {
  return (m_.transpose() * m_ - Eigen::Matrix3d::Identity()).norm();
}

Point3 apply_rigid(const RigidTransform& t, const Point3& p) {
  return Point3::from(t.rotation.matrix() * p.vec() + t.translation);
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {Rotation3(a.rotation.matrix() * b.rotation.matrix()),
          a.rotation.matrix() * b.translation + a.translation};
}

RigidTransform inverse(const RigidTransform& t) {
  const Rotation3 rt = t.rotation.transposed();
  return {rt, -(rt.matrix() * t.translation)};
}

}  // namespace mvcalib
