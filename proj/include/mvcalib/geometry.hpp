#pragma once

#include <Eigen/Core>

namespace mvcalib {

/// A point in a 3D world or camera frame (length units).
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static Point3 from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// A point on the image plane. Whether the units are image-plane or pixel
/// units is fixed by the producing function.
struct Point2 {
  double u = 0.0;
  double v = 0.0;

  Eigen::Vector2d vec() const { return {u, v}; }

  friend bool operator==(const Point2&, const Point2&) = default;
};

bool is_finite(const Point3& p);
bool is_finite(const Point2& p);

/// Proper rotation, stored row-major: row i is the i-th camera axis
/// expressed in world coordinates.
class Rotation3 {
 public:
  static constexpr double kTolerance = 1e-9;

  Rotation3() : m_(Eigen::Matrix3d::Identity()) {}

  /// Throws InvalidRotation unless ||M^T M - I||_F <= 1e-9 and
  /// |det(M) - 1| <= 1e-9. Near-orthogonal data goes through
  /// numeric::nearest_rotation first.
  explicit Rotation3(const Eigen::Matrix3d& m);

  static Rotation3 identity() { return Rotation3(); }

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }
  Rotation3 transposed() const;

  /// ||R^T R - I||_F
  double orthogonality_error() const;

  friend bool operator==(const Rotation3&, const Rotation3&) = default;

 private:
  Eigen::Matrix3d m_;
};

bool is_rotation(const Eigen::Matrix3d& m, double tolerance = Rotation3::kTolerance);

struct RigidTransform {
  Rotation3 rotation;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static RigidTransform identity() { return {}; }

  friend bool operator==(const RigidTransform&, const RigidTransform&) = default;
};

/// R * p + T
Point3 apply_rigid(const RigidTransform& t, const Point3& p);

/// Transform equivalent to applying `b` first, then `a`.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

RigidTransform inverse(const RigidTransform& t);

}  // namespace mvcalib
