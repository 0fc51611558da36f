#include "mvcalib/dlt.hpp"

#include <cmath>
#include <string>

#include "mvcalib/errors.hpp"

namespace mvcalib::dlt {
namespace {

constexpr double kSqrtArgFloor = 1e-12;

}  // namespace

numeric::Matrix build_design_matrix(std::span<const Correspondence> corrs) {
  if (corrs.size() < kMinCorrespondences) {
    throw Error(ErrorCode::TooFewPoints,
                "DLT needs at least 6 correspondences, got " + std::to_string(corrs.size()));
  }
  numeric::Matrix l = numeric::Matrix::Zero(2 * static_cast<Eigen::Index>(corrs.size()), 12);
  for (std::size_t i = 0; i < corrs.size(); ++i) {
    const auto& [w, px] = corrs[i];
    if (!is_finite(w) || !is_finite(px)) {
      throw Error(ErrorCode::NonFinite, "correspondence " + std::to_string(i) + " is not finite");
    }
    const auto r = 2 * static_cast<Eigen::Index>(i);
    l.row(r) << w.x, w.y, w.z, 1.0, 0.0, 0.0, 0.0, 0.0,
        -px.u * w.x, -px.u * w.y, -px.u * w.z, -px.u;
    l.row(r + 1) << 0.0, 0.0, 0.0, 0.0, w.x, w.y, w.z, 1.0,
        -px.v * w.x, -px.v * w.y, -px.v * w.z, -px.v;
  }
  return l;
}

Extraction extract_parameters(const ProjectionMatrix& m) {
  if (!m.is_normalized()) {
    throw Error(ErrorCode::NotNormalized, "||(m31, m32, m33)|| must equal 1");
  }
  const Eigen::Matrix<double, 3, 4>& a = m.matrix();
  const Eigen::Vector3d m1 = a.block<1, 3>(0, 0).transpose();
  const Eigen::Vector3d m2 = a.block<1, 3>(1, 0).transpose();
  const Eigen::Vector3d m3 = a.block<1, 3>(2, 0).transpose();

  const double u0 = m1.dot(m3);
  const double v0 = m2.dot(m3);
  const double au_sq = m1.dot(m1) - u0 * u0;
  const double av_sq = m2.dot(m2) - v0 * v0;
  if (!(au_sq > kSqrtArgFloor) || !(av_sq > kSqrtArgFloor)) {
    throw Error(ErrorCode::DegenerateFocal, "focal scale is not recoverable from M");
  }
  const double alpha_u = std::sqrt(au_sq);
  const double alpha_v = std::sqrt(av_sq);

  Eigen::Matrix3d raw;
  raw.row(0) = ((m1 - u0 * m3) / alpha_u).transpose();
  raw.row(1) = ((m2 - v0 * m3) / alpha_v).transpose();
  raw.row(2) = m3.transpose();

  const Eigen::Vector3d t((a(0, 3) - u0 * a(2, 3)) / alpha_u,
                          (a(1, 3) - v0 * a(2, 3)) / alpha_v,
                          a(2, 3));

  Extraction out;
  out.camera.intrinsics = CameraIntrinsics(alpha_u, alpha_v, u0, v0);
  out.camera.extrinsics = RigidTransform{numeric::nearest_rotation(raw), t};
  out.raw_rotation = raw;
  return out;
}

CalibrationResult calibrate(std::span<const Correspondence> corrs) {
  const numeric::Matrix l = build_design_matrix(corrs);

  Eigen::VectorXd a;
  try {
    a = numeric::solve_homogeneous(l);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RankDeficient) throw;
    throw Error(ErrorCode::DegenerateConfiguration,
                "calibration target is degenerate (coplanar or repeated points)");
  }

  Eigen::Matrix<double, 3, 4> raw;
  raw << a(0), a(1), a(2), a(3),
         a(4), a(5), a(6), a(7),
         a(8), a(9), a(10), a(11);
  ProjectionMatrix m = ProjectionMatrix(raw).normalized();

  // Depth of each calibration point along the optical axis; a normalized M
  // gives it directly as m3 . X + m34.
  std::size_t in_front = 0;
  std::size_t behind = 0;
  for (const auto& c : corrs) {
    const double depth = m.third_row_direction().dot(c.world.vec()) + m(2, 3);
    if (depth > kMinDepth) ++in_front;
    else if (depth < -kMinDepth) ++behind;
  }
  if (behind == corrs.size()) {
    m = ProjectionMatrix(-m.matrix());
  } else if (in_front != corrs.size()) {
    throw Error(ErrorCode::BadGeometry,
                "calibration points do not all lie on one side of the camera");
  }

  Extraction ex = extract_parameters(m);

  std::vector<Point3> world;
  std::vector<Point2> pixels;
  world.reserve(corrs.size());
  pixels.reserve(corrs.size());
  for (const auto& c : corrs) {
    world.push_back(c.world);
    pixels.push_back(c.pixel);
  }

  CalibrationResult result;
  result.matrix = m;
  result.camera = ex.camera;
  result.raw_rotation = ex.raw_rotation;
  result.errors = reprojection_errors(m, world, pixels);
  return result;
}

}  // namespace mvcalib::dlt
