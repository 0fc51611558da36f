#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mvcalib/dlt.hpp"
#include "mvcalib/features.hpp"
#include "mvcalib/geometry.hpp"
#include "mvcalib/projection.hpp"
#include "mvcalib/registration.hpp"

namespace mvcalib::sim {

inline constexpr std::string_view kRngAlgorithm = "mt19937_64";
inline constexpr std::string_view kGaussianAlgorithm = "box-muller";

/// Seeded random source with a fixed, documented algorithm so simulated
/// scenes are identical across platforms: uniforms take the top 53 bits of
/// an mt19937_64 draw, normals use the Box-Muller transform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double normal();
  Eigen::Vector3d unit_vector();
  /// Uniformly distributed rotation.
  Rotation3 rotation();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Independent sub-stream seed for (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

enum class Layout {
  TwoPlanes,    // corner target: dots on two orthogonal planes plus one off-plane dot
  SinglePlane,  // all dots on z = 0; only useful to exercise degeneracy handling
};

struct PatternSpec {
  std::size_t dot_count = 19;
  std::size_t calibration_count = 8;
  std::size_t registration_count = 18;
  double spacing = 0.1;  // grid pitch, length units
  double jitter = 0.01;  // uniform in-plane perturbation, +-
  Layout layout = Layout::TwoPlanes;
};

struct Pattern {
  std::vector<Point3> dots;  // global frame
  std::vector<std::size_t> calibration;
  std::vector<std::size_t> registration;
};

/// Corner target: dots alternate between the wall y = 0 and the floor
/// z = 0 on jittered grids; the last dot sits off both planes. The
/// calibration subset is spread evenly over the dot order (first and last
/// included); the registration subset is the leading dots.
///
/// Throws InvalidSpec if counts are out of range or if either subset lacks
/// three-dimensional extent (smallest singular value of the centred
/// coordinates <= 1e-6).
Pattern generate_pattern(const PatternSpec& spec, std::uint64_t seed);

/// Jittered grid of `count` points on a random plane; never a valid
/// calibration target.
std::vector<Point3> coplanar_points(std::size_t count, double spacing, std::uint64_t seed);

struct RigSpec {
  std::size_t camera_count = 4;
  Point3 target{0.15, 0.15, 0.15};
  /// Nominal direction from the target towards the camera.
  Eigen::Vector3d view_direction{0.45, 0.75, 0.5};
  double distance_min = 0.6;
  double distance_max = 0.8;
  double direction_jitter = 0.35;    // half-angle (rad) of the cone around view_direction
  double orientation_jitter = 0.03;  // rad, extra rotation after looking at the target
  CameraIntrinsics intrinsics{1000.0, 1000.0, 500.0, 550.0};
  double intrinsics_jitter = 0.0;  // relative perturbation of each camera's intrinsics
  int width = 1000;
  int height = 1100;
  double margin_px = 20.0;
  double min_separation_px = 20.0;
  /// One physical camera pose shared by every rig entry, each entry seeing
  /// the target through its own local frame.
  bool shared_pose = true;
  bool random_frames = true;
  double frame_offset = 1.0;  // local-frame translations drawn from [-offset, offset]^3
};

struct RigCamera {
  Camera camera;                   // global -> camera
  RigidTransform local_to_global;  // this entry's measurement frame

  /// Same camera with extrinsics relative to the local frame.
  Camera local_camera() const;
};

/// Camera at `distance` along `direction` from `target`, looking at it with
/// the image v axis pointing down the world z axis where possible.
RigidTransform look_at(const Point3& target, const Eigen::Vector3d& direction, double distance);

/// Throws Unsatisfiable if no pose sees every dot in front of the camera,
/// inside the margins and with the required separation within 1000 draws.
std::vector<RigCamera> generate_rig(const RigSpec& spec, const Pattern& pattern,
                                    std::uint64_t seed);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

struct Observation {
  /// Every dot, with local-frame world coordinates and (noisy) pixels.
  std::vector<dlt::Correspondence> correspondences;
  std::vector<Point2> exact_pixels;
  /// Registration subset measured in the local and global frames.
  registration::FramePair frame_pair;
};

/// Throws BehindCamera if a dot is not in front of the camera.
Observation observe(const RigCamera& rig_camera, const Pattern& pattern, const NoiseSpec& noise);

/// Correspondences restricted to the calibration subset.
std::vector<dlt::Correspondence> calibration_subset(const Observation& obs, const Pattern& pattern);

inline constexpr std::uint8_t kBackgroundIntensity = 230;
inline constexpr std::uint8_t kDotIntensity = 20;

/// Hard-edged dark discs on a light field: a pixel is dark when its centre
/// lies within `dot_radius_px` of a dot's exact projection. Throws OutOfFrame if a disc would not fit inside the image.
features::GrayImage render_dot_image(const Camera& camera, std::span<const Point3> dots,
                                     int width, int height, int dot_radius_px);

}  // namespace mvcalib::sim
