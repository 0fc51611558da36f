#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "mvcalib/geometry.hpp"
#include "mvcalib/numeric.hpp"
#include "mvcalib/projection.hpp"

namespace mvcalib::dlt {

/// Smallest number of correspondences giving the 11 independent equations
/// the 12-unknown homogeneous system needs.
inline constexpr std::size_t kMinCorrespondences = 6;

struct Correspondence {
  Point3 world;
  Point2 pixel;
};

/// Camera recovered from a normalized projection matrix, together with the
/// rotation rows as computed before orthogonalization.
struct Extraction {
  Camera camera;
  Eigen::Matrix3d raw_rotation;
};

struct CalibrationResult {
  ProjectionMatrix matrix;
  Camera camera;
  Eigen::Matrix3d raw_rotation;
  ReprojectionReport errors;
};

/// Two rows per correspondence, unknowns ordered m11..m14, m21..m24, m31..m34:
///   (xw, yw, zw, 1, 0, 0, 0, 0, -u xw, -u yw, -u zw, -u)
///   (0, 0, 0, 0, xw, yw, zw, 1, -v xw, -v yw, -v zw, -v)
/// Throws TooFewPoints for fewer than 6 correspondences.
numeric::Matrix build_design_matrix(std::span<const Correspondence> corrs);

/// Closed-form decomposition of a normalized M = K [R | T]:
///   u0 = m1.m3, v0 = m2.m3, alpha_u = sqrt(m1.m1 - u0^2), alpha_v likewise,
///   r1 = (m1 - u0 m3) / alpha_u, r2 = (m2 - v0 m3) / alpha_v, r3 = m3,
///   Tx = (m14 - u0 m34) / alpha_u, Ty = (m24 - v0 m34) / alpha_v, Tz = m34,
/// followed by projecting the rows (r1, r2, r3) onto the nearest rotation.
///
/// Throws NotNormalized if ||m3|| deviates from 1 by more than 1e-9 and
/// DegenerateFocal if either square-root argument is <= 1e-12.
Extraction extract_parameters(const ProjectionMatrix& m);

/// DLT calibration from 3D-2D correspondences.
///
/// The SVD null vector of the design matrix is reshaped into M, scaled so
/// that ||(m31, m32, m33)|| = 1 and signed so the calibration points lie in
/// front of the camera, then decomposed with extract_parameters.
///
/// Errors: TooFewPoints; DegenerateConfiguration when the design matrix has
/// no unique null direction (coplanar target, repeated points); BadGeometry
/// when the points straddle the camera plane under either sign.
CalibrationResult calibrate(std::span<const Correspondence> corrs);

}  // namespace mvcalib::dlt
