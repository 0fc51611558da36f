#include "mvcalib/registration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvcalib::registration {

FramePair::FramePair(std::vector<Point3> local, std::vector<Point3> global)
    : local_(std::move(local)), global_(std::move(global)) {
  if (local_.size() != global_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "local and global point counts differ");
  }
  if (local_.size() < kMinPoints) {
    throw Error(ErrorCode::TooFewPoints,
                "registration needs at least 4 point pairs, got " +
                    std::to_string(local_.size()));
  }
  for (std::size_t i = 0; i < local_.size(); ++i) {
    if (!is_finite(local_[i]) || !is_finite(global_[i])) {
      throw Error(ErrorCode::NonFinite, "frame pair " + std::to_string(i) + " is not finite");
    }
  }
}

std::pair<numeric::Matrix, numeric::Matrix> build_difference_system(const FramePair& fp) {
  const auto rows = static_cast<Eigen::Index>(fp.size()) - 1;
  numeric::Matrix a(rows, 3);
  numeric::Matrix b(rows, 3);
  const Eigen::Vector3d x1 = fp.local().front().vec();
  const Eigen::Vector3d y1 = fp.global().front().vec();
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto k = static_cast<std::size_t>(i) + 1;
    a.row(i) = (fp.local()[k].vec() - x1).transpose();
    b.row(i) = (fp.global()[k].vec() - y1).transpose();
  }
  return {a, b};
}

RigidTransform estimate_registration(const FramePair& fp) {
  const auto [a, b] = build_difference_system(fp);

  const Eigen::VectorXd sigma = numeric::singular_values(a);
  if (sigma.size() < 3 || !(sigma(0) > 0.0) || sigma(2) <= 1e-10 * sigma(0)) {
    throw Error(ErrorCode::DegenerateGeometry,
                "local points do not span three dimensions");
  }

  const numeric::Matrix z = numeric::solve_least_squares(a, b);
  const Eigen::Matrix3d candidate = z.transpose();
  const Rotation3 r = numeric::nearest_rotation(candidate);
  const Eigen::Vector3d t = fp.global().front().vec() - r.matrix() * fp.local().front().vec();
  return {r, t};
}

RegisteredCamera register_camera(const Camera& cam, const RigidTransform& frame) {
  RegisteredCamera out;
  out.camera.intrinsics = cam.intrinsics;
  out.camera.extrinsics = compose(cam.extrinsics, inverse(frame));
  out.frame_transform = frame;
  return out;
}

Point2 round_half_away(const Point2& p) { return {std::round(p.u), std::round(p.v)}; }

UnifiedPoint unify_point(std::span<const RegisteredCamera> cams, const Point3& p_global,
                         bool round_to_int, double tolerance,
                         const std::optional<SensorModel>& framebuffer) {
  if (cams.empty()) {
    throw Error(ErrorCode::InvalidArgument, "unification needs at least one camera");
  }

  UnifiedPoint out;
  out.rounded = round_to_int;
  out.entries.reserve(cams.size());
  std::vector<Point2> raw;
  bool all_visible = true;
  for (const auto& rc : cams) {
    UnifiedEntry entry;
    try {
      Point2 p = project(rc.camera, p_global);
      if (framebuffer) {
        const auto& k = rc.camera.intrinsics;
        p = image_to_framebuffer(*framebuffer, {p.u - k.u0, p.v - k.v0});
      }
      raw.push_back(p);
      entry.coordinate = round_to_int ? round_half_away(p) : p;
    } catch (const Error& e) {
      entry.error = e.code();
      all_visible = false;
    }
    out.entries.push_back(entry);
  }

  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = i + 1; j < raw.size(); ++j) {
      out.max_deviation = std::max(out.max_deviation, (raw[i].vec() - raw[j].vec()).norm());
    }
  }

  if (!all_visible) return out;

  const Point2 first = *out.entries.front().coordinate;
  bool agree = true;
  for (const auto& e : out.entries) {
    const Point2 c = *e.coordinate;
    if (round_to_int) {
      agree = agree && c == first;
    } else {
      agree = agree && (c.vec() - first.vec()).norm() <= tolerance;
    }
  }
  if (agree) out.consensus = first;
  return out;
}

void require_consensus(const UnifiedPoint& u) {
  if (!u.has_consensus()) {
    throw Error(ErrorCode::NoConsensus,
                "cameras disagree on the unified coordinate (max deviation " +
                    std::to_string(u.max_deviation) + ")");
  }
}

}  // namespace mvcalib::registration
