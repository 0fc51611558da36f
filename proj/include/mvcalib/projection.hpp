#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mvcalib/geometry.hpp"

namespace mvcalib {

/// Depth below which a point counts as on (or behind) the camera plane.
inline constexpr double kMinDepth = 1e-12;

/// Focal scales and principal point, all in pixels.
struct CameraIntrinsics {
  double alpha_u = 1.0;
  double alpha_v = 1.0;
  double u0 = 0.0;
  double v0 = 0.0;

  CameraIntrinsics() = default;
  /// Throws InvalidArgument unless both scales are positive and all values finite.
  CameraIntrinsics(double alpha_u, double alpha_v, double u0, double v0);

  /// Upper-triangular intrinsic matrix with zero skew.
  Eigen::Matrix3d matrix() const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Focal length and pixel pitch. The calibration only ever recovers their
/// quotients, so this exists to relate the physical quantities to the scales.
struct FocalModel {
  double focal_length = 1.0;
  double pitch_x = 1.0;
  double pitch_y = 1.0;

  double alpha_u() const { return focal_length / pitch_x; }
  double alpha_v() const { return focal_length / pitch_y; }
};

/// Pinhole camera: intrinsics plus the world-to-camera transform.
struct Camera {
  CameraIntrinsics intrinsics;
  RigidTransform extrinsics;

  friend bool operator==(const Camera&, const Camera&) = default;
};

/// 3x4 matrix mapping homogeneous world points to homogeneous pixels.
class ProjectionMatrix {
 public:
  static constexpr double kNormTolerance = 1e-9;

  ProjectionMatrix() : m_(Eigen::Matrix<double, 3, 4>::Zero()) {}
  /// Throws NonFinite on NaN/Inf entries.
  explicit ProjectionMatrix(const Eigen::Matrix<double, 3, 4>& m);

  const Eigen::Matrix<double, 3, 4>& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  /// (m31, m32, m33)
  Eigen::Vector3d third_row_direction() const { return m_.block<1, 3>(2, 0).transpose(); }

  bool is_normalized() const;

  /// Copy rescaled so that ||(m31, m32, m33)|| = 1. The sign is preserved.
  /// Throws DegenerateDepth if that row is zero.
  ProjectionMatrix normalized() const;

  friend bool operator==(const ProjectionMatrix&, const ProjectionMatrix&) = default;

 private:
  Eigen::Matrix<double, 3, 4> m_;
};

/// Frame-buffer conversion parameters: sensor cell pitch, uncertainty factor
/// (pinned to 1) and frame-buffer centre.
struct SensorModel {
  double dx = 1.0;
  double dy = 1.0;
  double sx = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  SensorModel() = default;
  /// Throws InvalidArgument unless dx, dy > 0. The uncertainty factor is always 1.
  SensorModel(double dx, double dy, double cx, double cy);

  /// Unit pitch with the centre at the middle of a width x height frame.
  static SensorModel centered(double width, double height);
};

Point3 world_to_camera(const Camera& cam, const Point3& p);

/// (alpha_u X/Z + u0, alpha_v Y/Z + v0). Throws BehindCamera if Z <= 1e-12.
Point2 camera_to_pixel(const Camera& cam, const Point3& pc);

Point2 project(const Camera& cam, const Point3& p);

/// Explicit M = K [R | T]; the third row is (r3 | Tz), so M is normalized.
ProjectionMatrix to_matrix(const Camera& cam);

/// Homogeneous projection through M. Throws DegenerateDepth when the
/// homogeneous scale is within 1e-12 of zero.
Point2 project_matrix(const ProjectionMatrix& m, const Point3& p);

/// Image-plane to frame-buffer coordinates:
/// (sx * u / dx + cx, v / dy + cy).
Point2 image_to_framebuffer(const SensorModel& s, const Point2& p);

/// Per-axis mean residuals (observed - projected) and the RMS of the
/// Euclidean residual length, laid out like a per-camera error table row.
struct ReprojectionReport {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double rms = 0.0;
  std::size_t count = 0;
  std::vector<Point2> residuals;
};

ReprojectionReport reprojection_errors(const ProjectionMatrix& m,
                                       std::span<const Point3> world,
                                       std::span<const Point2> observed);

}  // namespace mvcalib
