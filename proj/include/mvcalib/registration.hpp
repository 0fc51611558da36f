#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mvcalib/errors.hpp"
#include "mvcalib/geometry.hpp"
#include "mvcalib/numeric.hpp"
#include "mvcalib/projection.hpp"

namespace mvcalib::registration {

/// The same physical points measured in a camera's local frame and in the
/// shared global frame.
class FramePair {
 public:
  static constexpr std::size_t kMinPoints = 4;

  /// Throws ShapeMismatch on unequal lengths, TooFewPoints below 4 pairs,
  /// NonFinite on NaN/Inf coordinates.
  FramePair(std::vector<Point3> local, std::vector<Point3> global);

  const std::vector<Point3>& local() const { return local_; }
  const std::vector<Point3>& global() const { return global_; }
  std::size_t size() const { return local_.size(); }

 private:
  std::vector<Point3> local_;
  std::vector<Point3> global_;
};

struct RegisteredCamera {
  Camera camera;                  // extrinsics relative to the global frame
  RigidTransform frame_transform; // local -> global
};

/// Differences against the first pair: row i of A is x_{i+1} - x_1 and row i
/// of b is y_{i+1} - y_1, so A Z = b is solved by Z = R^T and the
/// translation drops out.
std::pair<numeric::Matrix, numeric::Matrix> build_difference_system(const FramePair& fp);

/// Least-squares local -> global transform. R is the nearest rotation to the
/// transposed least-squares Z; T = y_1 - R x_1.
///
/// Throws DegenerateGeometry when the difference rows do not span 3D
/// (coincident, collinear or coplanar-through-first-point data).
RigidTransform estimate_registration(const FramePair& fp);

/// Re-expresses a camera calibrated in its local frame w.r.t. the global
/// frame: new extrinsics = extrinsics o frame^-1. Intrinsics are copied.
RegisteredCamera register_camera(const Camera& cam, const RigidTransform& frame);

/// Rounds half away from zero.
Point2 round_half_away(const Point2& p);

struct UnifiedEntry {
  std::optional<Point2> coordinate;  // empty when the camera cannot see the point
  std::optional<ErrorCode> error;
};

struct UnifiedPoint {
  std::vector<UnifiedEntry> entries;
  std::optional<Point2> consensus;  // first camera's value, set only on agreement
  double max_deviation = 0.0;       // largest pairwise Euclidean distance (unrounded)
  bool rounded = false;

  bool has_consensus() const { return consensus.has_value(); }
};

/// Default agreement tolerance for unrounded coordinates.
inline constexpr double kUnifyTolerance = 1e-8;

/// Projects a global point through every registered camera. With
/// `round_to_int` the coordinates are rounded half away from zero and must
/// match exactly; otherwise they must agree within `tolerance`. Cameras
/// that cannot see the point get an error entry and prevent consensus.
///
/// With a `framebuffer` model, each camera's coordinate relative to its own
/// principal point is passed through image_to_framebuffer before rounding
/// and comparison.
///
/// Throws InvalidArgument on an empty camera list.
UnifiedPoint unify_point(std::span<const RegisteredCamera> cams, const Point3& p_global,
                         bool round_to_int, double tolerance = kUnifyTolerance,
                         const std::optional<SensorModel>& framebuffer = std::nullopt);

/// Throws NoConsensus unless `u` has a consensus value.
void require_consensus(const UnifiedPoint& u);

}  // namespace mvcalib::registration
