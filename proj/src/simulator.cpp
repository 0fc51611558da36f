#include "mvcalib/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "mvcalib/errors.hpp"
#include "mvcalib/numeric.hpp"

namespace mvcalib::sim {
namespace {

constexpr int kMaxAttempts = 1000;

double smallest_centered_singular_value(const std::vector<Point3>& pts) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : pts) mean += p.vec();
  mean /= static_cast<double>(pts.size());
  numeric::Matrix c(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    c.row(static_cast<Eigen::Index>(i)) = (pts[i].vec() - mean).transpose();
  }
  const Eigen::VectorXd s = numeric::singular_values(c);
  return s.size() < 3 ? 0.0 : s(2);
}

std::vector<Point3> pick(const std::vector<Point3>& dots, const std::vector<std::size_t>& idx) {
  std::vector<Point3> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(dots[i]);
  return out;
}

// Small rotation about a random axis with angle uniform in [0, max_angle].
Eigen::Matrix3d random_tilt(Rng& rng, double max_angle) {
  if (max_angle <= 0.0) return Eigen::Matrix3d::Identity();
  const Eigen::Vector3d axis = rng.unit_vector();
  return Eigen::AngleAxisd(rng.uniform(0.0, max_angle), axis).toRotationMatrix();
}

Eigen::Vector3d jitter_direction(Rng& rng, const Eigen::Vector3d& dir, double half_angle) {
  return random_tilt(rng, half_angle) * dir.normalized();
}

bool sees_pattern(const RigSpec& spec, const Camera& cam, const Pattern& pattern) {
  std::vector<Point2> px;
  px.reserve(pattern.dots.size());
  for (const auto& d : pattern.dots) {
    const Point3 pc = world_to_camera(cam, d);
    if (pc.z <= kMinDepth) return false;
    const Point2 p = camera_to_pixel(cam, pc);
    if (p.u < spec.margin_px || p.v < spec.margin_px ||
        p.u > spec.width - 1 - spec.margin_px || p.v > spec.height - 1 - spec.margin_px) {
      return false;
    }
    px.push_back(p);
  }
  for (std::size_t i = 0; i < px.size(); ++i) {
    for (std::size_t j = i + 1; j < px.size(); ++j) {
      if ((px[i].vec() - px[j].vec()).norm() < spec.min_separation_px) return false;
    }
  }
  return true;
}

CameraIntrinsics draw_intrinsics(Rng& rng, const RigSpec& spec) {
  const auto& k = spec.intrinsics;
  if (spec.intrinsics_jitter <= 0.0) return k;
  const double j = spec.intrinsics_jitter;
  return CameraIntrinsics(k.alpha_u * (1.0 + rng.uniform(-j, j)),
                          k.alpha_v * (1.0 + rng.uniform(-j, j)),
                          k.u0 * (1.0 + rng.uniform(-j, j)),
                          k.v0 * (1.0 + rng.uniform(-j, j)));
}

Camera draw_camera(Rng& rng, const RigSpec& spec, const Pattern& pattern) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const Eigen::Vector3d dir = jitter_direction(rng, spec.view_direction, spec.direction_jitter);
    const double dist = spec.distance_min == spec.distance_max
                            ? spec.distance_min
                            : rng.uniform(spec.distance_min, spec.distance_max);
    RigidTransform pose = look_at(spec.target, dir, dist);
    // Tilt about the camera centre: R' = Q R, T' = Q T keeps the centre fixed.
    const Eigen::Matrix3d tilt = random_tilt(rng, spec.orientation_jitter);
    pose = RigidTransform{numeric::nearest_rotation(tilt * pose.rotation.matrix()),
                          tilt * pose.translation};
    Camera cam{draw_intrinsics(rng, spec), pose};
    if (sees_pattern(spec, cam, pattern)) return cam;
  }
  throw Error(ErrorCode::Unsatisfiable,
              "no camera pose satisfies the visibility constraints in 1000 attempts");
}

}  // namespace

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = mag * std::sin(angle);
  has_spare_ = true;
  return mag * std::cos(angle);
}

Eigen::Vector3d Rng::unit_vector() {
  for (;;) {
    Eigen::Vector3d v(normal(), normal(), normal());
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

Rotation3 Rng::rotation() {
  Eigen::Quaterniond q(normal(), normal(), normal(), normal());
  q.normalize();
  return numeric::nearest_rotation(q.toRotationMatrix());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Pattern generate_pattern(const PatternSpec& spec, std::uint64_t seed) {
  const std::size_t n = spec.dot_count;
  if (n < dlt::kMinCorrespondences) {
    throw Error(ErrorCode::InvalidSpec, "pattern needs at least 6 dots");
  }
  if (spec.calibration_count < dlt::kMinCorrespondences || spec.calibration_count > n) {
    throw Error(ErrorCode::InvalidSpec, "calibration subset must hold 6..dot_count dots");
  }
  if (spec.registration_count < registration::FramePair::kMinPoints ||
      spec.registration_count > n) {
    throw Error(ErrorCode::InvalidSpec, "registration subset must hold 4..dot_count dots");
  }
  if (!(spec.spacing > 0.0) || spec.jitter < 0.0 || spec.jitter >= spec.spacing / 2.0) {
    throw Error(ErrorCode::InvalidSpec, "spacing must be positive and jitter below half of it");
  }

  Rng rng(seed);
  const double s = spec.spacing;
  auto jit = [&] { return spec.jitter > 0.0 ? rng.uniform(-spec.jitter, spec.jitter) : 0.0; };

  Pattern pattern;
  pattern.dots.reserve(n);
  if (spec.layout == Layout::SinglePlane) {
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    for (std::size_t i = 0; i < n; ++i) {
      pattern.dots.push_back({s / 2 + s * static_cast<double>(i % cols) + jit(),
                              s / 2 + s * static_cast<double>(i / cols) + jit(), 0.0});
    }
  } else {
    const std::size_t on_planes = n - 1;
    const std::size_t wall_count = (on_planes + 1) / 2;
    const auto cols =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(wall_count))));
    std::size_t wall = 0;
    std::size_t floor = 0;
    for (std::size_t i = 0; i < on_planes; ++i) {
      if (i % 2 == 0) {
        const double a = s / 2 + s * static_cast<double>(wall % cols) + jit();
        const double b = s / 2 + s * static_cast<double>(wall / cols) + jit();
        pattern.dots.push_back({a, 0.0, b});
        ++wall;
      } else {
        const double a = s / 2 + s * static_cast<double>(floor % cols) + jit();
        const double b = s / 2 + s * static_cast<double>(floor / cols) + jit();
        pattern.dots.push_back({a, b, 0.0});
        ++floor;
      }
    }
    const double mid = s * static_cast<double>(cols) / 2.0;
    pattern.dots.push_back({mid + jit(), mid + jit(), mid + jit()});
  }

  const std::size_t c = spec.calibration_count;
  for (std::size_t i = 0; i < c; ++i) {
    pattern.calibration.push_back((i * (n - 1) + (c - 1) / 2) / (c - 1));
  }
  for (std::size_t i = 0; i < spec.registration_count; ++i) pattern.registration.push_back(i);

  if (smallest_centered_singular_value(pick(pattern.dots, pattern.calibration)) <= 1e-6) {
    throw Error(ErrorCode::InvalidSpec, "calibration subset is coplanar");
  }
  if (smallest_centered_singular_value(pick(pattern.dots, pattern.registration)) <= 1e-6) {
    throw Error(ErrorCode::InvalidSpec, "registration subset is coplanar");
  }
  return pattern;
}

std::vector<Point3> coplanar_points(std::size_t count, double spacing, std::uint64_t seed) {
  Rng rng(seed);
  const Rotation3 r = rng.rotation();
  const Eigen::Vector3d offset(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                               rng.uniform(-0.5, 0.5));
  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  std::vector<Point3> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::Vector3d local(spacing * static_cast<double>(i % cols) + rng.uniform(-0.2, 0.2) * spacing,
                                spacing * static_cast<double>(i / cols) + rng.uniform(-0.2, 0.2) * spacing,
                                0.0);
    out.push_back(Point3::from(r.matrix() * local + offset));
  }
  return out;
}

Camera RigCamera::local_camera() const {
  return {camera.intrinsics, compose(camera.extrinsics, local_to_global)};
}

RigidTransform look_at(const Point3& target, const Eigen::Vector3d& direction, double distance) {
  const Eigen::Vector3d dir = direction.normalized();
  const Eigen::Vector3d center = target.vec() + distance * dir;
  const Eigen::Vector3d z = -dir;  // optical axis towards the target
  Eigen::Vector3d up(0.0, 0.0, 1.0);
  if (std::abs(z.dot(up)) > 0.999) up = Eigen::Vector3d(0.0, 1.0, 0.0);
  const Eigen::Vector3d y = (-up + up.dot(z) * z).normalized();
  const Eigen::Vector3d x = y.cross(z);
  Eigen::Matrix3d r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  const Rotation3 rot = numeric::nearest_rotation(r);
  return {rot, -(rot.matrix() * center)};
}

std::vector<RigCamera> generate_rig(const RigSpec& spec, const Pattern& pattern,
                                    std::uint64_t seed) {
  if (spec.camera_count == 0 || spec.width <= 0 || spec.height <= 0 ||
      !(spec.distance_min > 0.0) || spec.distance_max < spec.distance_min) {
    throw Error(ErrorCode::InvalidSpec, "invalid rig specification");
  }
  Rng rng(seed);
  std::vector<RigCamera> rig;
  rig.reserve(spec.camera_count);
  Camera shared;
  if (spec.shared_pose) shared = draw_camera(rng, spec, pattern);
  for (std::size_t i = 0; i < spec.camera_count; ++i) {
    RigCamera rc;
    rc.camera = spec.shared_pose ? shared : draw_camera(rng, spec, pattern);
    if (spec.random_frames) {
      const Rotation3 r = rng.rotation();
      const double o = spec.frame_offset;
      rc.local_to_global = {r, {rng.uniform(-o, o), rng.uniform(-o, o), rng.uniform(-o, o)}};
    }
    rig.push_back(rc);
  }
  return rig;
}

Observation observe(const RigCamera& rig_camera, const Pattern& pattern, const NoiseSpec& noise) {
  if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
    throw Error(ErrorCode::InvalidSpec, "noise sigma must be finite and non-negative");
  }
  Rng rng(noise.seed);
  const RigidTransform global_to_local = inverse(rig_camera.local_to_global);

  std::vector<dlt::Correspondence> corrs;
  std::vector<Point2> exact;
  corrs.reserve(pattern.dots.size());
  for (const auto& dot : pattern.dots) {
    const Point2 p = project(rig_camera.camera, dot);
    exact.push_back(p);
    Point2 noisy = p;
    if (noise.sigma > 0.0) {
      noisy.u += noise.sigma * rng.normal();
      noisy.v += noise.sigma * rng.normal();
    }
    corrs.push_back({apply_rigid(global_to_local, dot), noisy});
  }

  std::vector<Point3> local;
  std::vector<Point3> global;
  for (auto i : pattern.registration) {
    local.push_back(corrs[i].world);
    global.push_back(pattern.dots[i]);
  }
  return {std::move(corrs), std::move(exact),
          registration::FramePair(std::move(local), std::move(global))};
}

std::vector<dlt::Correspondence> calibration_subset(const Observation& obs,
                                                    const Pattern& pattern) {
  std::vector<dlt::Correspondence> out;
  out.reserve(pattern.calibration.size());
  for (auto i : pattern.calibration) out.push_back(obs.correspondences[i]);
  return out;
}

features::GrayImage render_dot_image(const Camera& camera, std::span<const Point3> dots,
                                     int width, int height, int dot_radius_px) {
  if (dot_radius_px < 0) {
    throw Error(ErrorCode::InvalidArgument, "dot radius must be non-negative");
  }
  features::GrayImage img(width, height, kBackgroundIntensity);
  const int r = dot_radius_px;
  const double r2 = static_cast<double>(r) * r;
  for (const auto& dot : dots) {
    const Point2 p = project(camera, dot);
    if (p.u - r < 0.0 || p.v - r < 0.0 || p.u + r > width - 1 || p.v + r > height - 1) {
      throw Error(ErrorCode::OutOfFrame, "dot does not fit inside the image");
    }
    // Pixels whose centre lies inside the disc around the exact projection.
    const int c0 = static_cast<int>(std::ceil(p.u - r));
    const int c1 = static_cast<int>(std::floor(p.u + r));
    const int r0 = static_cast<int>(std::ceil(p.v - r));
    const int r1 = static_cast<int>(std::floor(p.v + r));
    for (int row = r0; row <= r1; ++row) {
      for (int col = c0; col <= c1; ++col) {
        const double du = col - p.u;
        const double dv = row - p.v;
        if (du * du + dv * dv <= r2) img.at(col, row) = kDotIntensity;
      }
    }
  }
  return img;
}

}  // namespace mvcalib::sim
