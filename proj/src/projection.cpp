#include "mvcalib/projection.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "mvcalib/errors.hpp"

namespace mvcalib {

CameraIntrinsics::CameraIntrinsics(double alpha_u, double alpha_v, double u0, double v0)
    : alpha_u(alpha_u), alpha_v(alpha_v), u0(u0), v0(v0) {
  if (!std::isfinite(alpha_u) || !std::isfinite(alpha_v) || !std::isfinite(u0) ||
      !std::isfinite(v0)) {
    throw Error(ErrorCode::NonFinite, "intrinsics must be finite");
  }
  if (!(alpha_u > 0.0) || !(alpha_v > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "focal scales must be positive");
  }
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << alpha_u, 0.0, u0,
       0.0, alpha_v, v0,
       0.0, 0.0, 1.0;
  return k;
}

ProjectionMatrix::ProjectionMatrix(const Eigen::Matrix<double, 3, 4>& m) : m_(m) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFinite, "projection matrix has non-finite entries");
  }
}

bool ProjectionMatrix::is_normalized() const {
  return std::abs(third_row_direction().norm() - 1.0) <= kNormTolerance;
}

ProjectionMatrix ProjectionMatrix::normalized() const {
  const double n = third_row_direction().norm();
  if (!(n > 0.0)) {
    throw Error(ErrorCode::DegenerateDepth, "third row of the projection matrix is zero");
  }
  return ProjectionMatrix(m_ / n);
}

SensorModel::SensorModel(double dx, double dy, double cx, double cy)
    : dx(dx), dy(dy), sx(1.0), cx(cx), cy(cy) {
  if (!(dx > 0.0) || !(dy > 0.0) || !std::isfinite(dx) || !std::isfinite(dy)) {
    throw Error(ErrorCode::InvalidArgument, "sensor pitch must be positive and finite");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw Error(ErrorCode::NonFinite, "frame-buffer centre must be finite");
  }
}

SensorModel SensorModel::centered(double width, double height) {
  return SensorModel(1.0, 1.0, width / 2.0, height / 2.0);
}

Point3 world_to_camera(const Camera& cam, const Point3& p) {
  return apply_rigid(cam.extrinsics, p);
}

Point2 camera_to_pixel(const Camera& cam, const Point3& pc) {
  if (pc.z <= kMinDepth) {
    throw Error(ErrorCode::BehindCamera, "point is not in front of the camera");
  }
  const auto& k = cam.intrinsics;
  return {k.alpha_u * pc.x / pc.z + k.u0, k.alpha_v * pc.y / pc.z + k.v0};
}

Point2 project(const Camera& cam, const Point3& p) {
  return camera_to_pixel(cam, world_to_camera(cam, p));
}

ProjectionMatrix to_matrix(const Camera& cam) {
  const auto& k = cam.intrinsics;
  const Eigen::Matrix3d& r = cam.extrinsics.rotation.matrix();
  const Eigen::Vector3d& t = cam.extrinsics.translation;

  Eigen::Matrix<double, 3, 4> m;
  m.block<1, 3>(0, 0) = k.alpha_u * r.row(0) + k.u0 * r.row(2);
  m.block<1, 3>(1, 0) = k.alpha_v * r.row(1) + k.v0 * r.row(2);
  m.block<1, 3>(2, 0) = r.row(2);
  m(0, 3) = k.alpha_u * t.x() + k.u0 * t.z();
  m(1, 3) = k.alpha_v * t.y() + k.v0 * t.z();
  m(2, 3) = t.z();
  return ProjectionMatrix(m);
}

Point2 project_matrix(const ProjectionMatrix& m, const Point3& p) {
  const Eigen::Vector3d h = m.matrix() * p.vec().homogeneous();
  if (std::abs(h.z()) <= kMinDepth) {
    throw Error(ErrorCode::DegenerateDepth, "homogeneous scale is zero");
  }
  return {h.x() / h.z(), h.y() / h.z()};
}

Point2 image_to_framebuffer(const SensorModel& s, const Point2& p) {
  return {s.sx * p.u / s.dx + s.cx, p.v / s.dy + s.cy};
}

ReprojectionReport reprojection_errors(const ProjectionMatrix& m,
                                       std::span<const Point3> world,
                                       std::span<const Point2> observed) {
  if (world.size() != observed.size()) {
    throw Error(ErrorCode::ShapeMismatch, "world and observed point counts differ");
  }
  if (world.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "no points to evaluate");
  }

  ReprojectionReport report;
  report.count = world.size();
  report.residuals.reserve(world.size());
  double sum_x = 0.0;
  double sum_y = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < world.size(); ++i) {
    const Point2 predicted = project_matrix(m, world[i]);
    const Point2 r{observed[i].u - predicted.u, observed[i].v - predicted.v};
    report.residuals.push_back(r);
    sum_x += r.u;
    sum_y += r.v;
    sum_sq += r.u * r.u + r.v * r.v;
  }
  const auto n = static_cast<double>(world.size());
  report.mean_x = sum_x / n;
  report.mean_y = sum_y / n;
  report.rms = std::sqrt(sum_sq / n);
  return report;
}

}  // namespace mvcalib
