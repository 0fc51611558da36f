#include "mvcalib/dlt.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include "mvcalib/errors.hpp"
#include "test_support.hpp"

using namespace mvcalib;
using mvcalib::testing::Draw;
using mvcalib::testing::rel_err;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

Camera reference_camera(Draw& d) {
  return {CameraIntrinsics(800.0, 820.0, 320.0, 240.0),
          {d.rotation(), Eigen::Vector3d(d.uniform(-0.5, 0.5), d.uniform(-0.5, 0.5), 10.0)}};
}

std::vector<dlt::Correspondence> exact_correspondences(Draw& d, const Camera& cam, int n) {
  std::vector<dlt::Correspondence> out;
  for (int i = 0; i < n; ++i) {
    const Point3 w = d.point(-1.0, 1.0);
    out.push_back({w, project(cam, w)});
  }
  return out;
}

void expect_camera_near(const Camera& got, const Camera& want, double rel_tol, double rot_tol) {
  EXPECT_LT(rel_err(got.intrinsics.alpha_u, want.intrinsics.alpha_u), rel_tol);
  EXPECT_LT(rel_err(got.intrinsics.alpha_v, want.intrinsics.alpha_v), rel_tol);
  EXPECT_LT(rel_err(got.intrinsics.u0, want.intrinsics.u0), rel_tol);
  EXPECT_LT(rel_err(got.intrinsics.v0, want.intrinsics.v0), rel_tol);
  EXPECT_LT((got.extrinsics.rotation.matrix() - want.extrinsics.rotation.matrix()).norm(), rot_tol);
  EXPECT_LT((got.extrinsics.translation - want.extrinsics.translation).norm(),
            rel_tol * std::max(1.0, want.extrinsics.translation.norm()));
}

}  // namespace

TEST(BuildDesignMatrix, RowsFollowTheTwoEquationsPerPoint) {
  std::vector<dlt::Correspondence> corrs{
      {{0, 0, 0}, {0, 0}}, {{1, 0, 0}, {2, 3}}, {{0, 1, 0}, {1, 1}},
      {{0, 0, 1}, {1, 1}}, {{1, 1, 0}, {1, 1}}, {{1, 0, 1}, {1, 1}}};
  const numeric::Matrix l = dlt::build_design_matrix(corrs);
  ASSERT_EQ(l.rows(), 12);
  ASSERT_EQ(l.cols(), 12);

  Eigen::RowVectorXd r0(12), r1(12), r2(12), r3(12);
  r0 << 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0;
  r1 << 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0;
  r2 << 1, 0, 0, 1, 0, 0, 0, 0, -2, 0, 0, -2;
  r3 << 0, 0, 0, 0, 1, 0, 0, 1, -3, 0, 0, -3;
  EXPECT_EQ(l.row(0), r0);
  EXPECT_EQ(l.row(1), r1);
  EXPECT_EQ(l.row(2), r2);
  EXPECT_EQ(l.row(3), r3);
}

TEST(BuildDesignMatrix, AnnihilatesTrueMatrixOnExactData) {
  Draw d(61);
  for (int trial = 0; trial < 50; ++trial) {
    const Camera cam = d.camera();
    const auto corrs = exact_correspondences(d, cam, 10);
    const numeric::Matrix l = dlt::build_design_matrix(corrs);
    const Eigen::Matrix<double, 3, 4> m = to_matrix(cam).matrix();
    Eigen::VectorXd vec(12);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) vec(4 * r + c) = m(r, c);
    }
    EXPECT_LT((l * vec).norm(), 1e-9 * l.norm() * vec.norm());
  }
}

TEST(BuildDesignMatrix, TooFewPoints) {
  Draw d(62);
  const auto corrs = exact_correspondences(d, d.camera(), 5);
  EXPECT_EQ(code_of([&] { dlt::build_design_matrix(corrs); }), ErrorCode::TooFewPoints);
  EXPECT_EQ(code_of([&] { dlt::calibrate(corrs); }), ErrorCode::TooFewPoints);
}

TEST(ExtractParameters, HandInvertedMatrices) {
  const auto id = dlt::extract_parameters(ProjectionMatrix(Eigen::Matrix<double, 3, 4>::Identity()));
  EXPECT_EQ(id.camera.intrinsics, CameraIntrinsics(1, 1, 0, 0));
  EXPECT_EQ(id.camera.extrinsics.rotation.matrix(), Eigen::Matrix3d::Identity());
  EXPECT_EQ(id.camera.extrinsics.translation, Eigen::Vector3d::Zero());

  Eigen::Matrix<double, 3, 4> m;
  m << 2, 0, 3, 15,
       0, 1, 0, 0,
       0, 0, 1, 5;
  const auto ex = dlt::extract_parameters(ProjectionMatrix(m));
  EXPECT_DOUBLE_EQ(ex.camera.intrinsics.u0, 3.0);
  EXPECT_DOUBLE_EQ(ex.camera.intrinsics.alpha_u, 2.0);
  EXPECT_DOUBLE_EQ(ex.camera.intrinsics.v0, 0.0);
  EXPECT_DOUBLE_EQ(ex.camera.intrinsics.alpha_v, 1.0);
  EXPECT_EQ(ex.camera.extrinsics.translation, Eigen::Vector3d(0, 0, 5));
  EXPECT_LT((ex.camera.extrinsics.rotation.matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-15);
}

TEST(ExtractParameters, InvertsToMatrix) {
  Draw d(63);
  for (int trial = 0; trial < 500; ++trial) {
    const Camera cam = d.camera();
    const auto ex = dlt::extract_parameters(to_matrix(cam));
    expect_camera_near(ex.camera, cam, 1e-9, 1e-9);
  }
}

TEST(ExtractParameters, ScaleInvariantAfterRenormalization) {
  Draw d(64);
  for (int trial = 0; trial < 100; ++trial) {
    const ProjectionMatrix m = to_matrix(d.camera());
    const double lambda = d.uniform(0.01, 100.0);
    const auto a = dlt::extract_parameters(m);
    const auto b = dlt::extract_parameters(ProjectionMatrix(lambda * m.matrix()).normalized());
    EXPECT_LT(rel_err(a.camera.intrinsics.alpha_u, b.camera.intrinsics.alpha_u), 1e-10);
    EXPECT_LT(rel_err(a.camera.intrinsics.alpha_v, b.camera.intrinsics.alpha_v), 1e-10);
    EXPECT_LT(rel_err(a.camera.intrinsics.u0, b.camera.intrinsics.u0), 1e-10);
    EXPECT_LT(rel_err(a.camera.intrinsics.v0, b.camera.intrinsics.v0), 1e-10);
    EXPECT_LT((a.camera.extrinsics.rotation.matrix() - b.camera.extrinsics.rotation.matrix()).norm(), 1e-10);
    EXPECT_LT((a.camera.extrinsics.translation - b.camera.extrinsics.translation).norm(), 1e-10);
  }
}

TEST(ExtractParameters, Errors) {
  const Eigen::Matrix<double, 3, 4> twice = 2.0 * Eigen::Matrix<double, 3, 4>::Identity();
  EXPECT_EQ(code_of([&] { dlt::extract_parameters(ProjectionMatrix(twice)); }),
            ErrorCode::NotNormalized);

  Eigen::Matrix<double, 3, 4> flat;  // m1 parallel to m3: no horizontal focal scale
  flat << 0, 0, 1, 0,
          0, 1, 0, 0,
          0, 0, 1, 5;
  EXPECT_EQ(code_of([&] { dlt::extract_parameters(ProjectionMatrix(flat)); }),
            ErrorCode::DegenerateFocal);
}

TEST(Calibrate, RecoversReferenceCameraFromEightExactPoints) {
  Draw d(65);
  for (int trial = 0; trial < 20; ++trial) {
    const Camera cam = reference_camera(d);
    const auto result = dlt::calibrate(exact_correspondences(d, cam, 8));
    expect_camera_near(result.camera, cam, 1e-8, 1e-8);
    EXPECT_TRUE(result.matrix.is_normalized());
    EXPECT_GT(result.matrix(2, 3), 0.0);
    EXPECT_LT((result.raw_rotation - result.camera.extrinsics.rotation.matrix()).norm(), 1e-7);
    EXPECT_LT(result.errors.rms, 1e-8);
  }
}

TEST(Calibrate, ExactRoundTripOnRandomCameras) {
  Draw d(66);
  for (int trial = 0; trial < 100; ++trial) {
    const Camera cam = d.camera();
    const auto result = dlt::calibrate(exact_correspondences(d, cam, d.integer(6, 30)));
    expect_camera_near(result.camera, cam, 1e-7, 1e-7);
    EXPECT_LT(result.errors.rms, 1e-8);
  }
}

TEST(Calibrate, NoisyMeansStayBelowOnePixel) {
  Draw d(67);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    const Camera cam = reference_camera(d);
    auto corrs = exact_correspondences(d, cam, 20);
    for (auto& c : corrs) {
      c.pixel.u += noise(d.engine());
      c.pixel.v += noise(d.engine());
    }
    const auto result = dlt::calibrate(corrs);
    EXPECT_LT(std::abs(result.errors.mean_x), 1.0);
    EXPECT_LT(std::abs(result.errors.mean_y), 1.0);
    EXPECT_TRUE(result.camera.extrinsics.rotation.orthogonality_error() < 1e-9);
  }
}

TEST(Calibrate, CoplanarTargetIsDegenerate) {
  Draw d(68);
  const Camera cam = reference_camera(d);
  std::vector<dlt::Correspondence> corrs;
  for (int i = 0; i < 8; ++i) {
    const Point3 w{d.uniform(-1, 1), d.uniform(-1, 1), 0.0};
    corrs.push_back({w, project(cam, w)});
  }
  // Independent check with a different SVD algorithm: the two smallest
  // singular values of L coincide relative to the largest.
  const Eigen::VectorXd s = Eigen::BDCSVD<Eigen::MatrixXd>(dlt::build_design_matrix(corrs)).singularValues();
  EXPECT_LT(s(10) - s(11), 1e-10 * s(0));

  EXPECT_EQ(code_of([&] { dlt::calibrate(corrs); }), ErrorCode::DegenerateConfiguration);
}

TEST(Calibrate, PointsOnBothSidesOfCameraAreBadGeometry) {
  // Pixels generated by the homogeneous projection itself, so the DLT fit is
  // exact, but two points sit behind the camera plane.
  Draw d(69);
  const Camera cam{CameraIntrinsics(800, 800, 320, 240), {d.rotation(), {0.1, -0.2, 0.5}}};
  const ProjectionMatrix m = to_matrix(cam);
  std::vector<dlt::Correspondence> corrs;
  while (corrs.size() < 10) {
    const Point3 w = d.point(-1.0, 1.0);
    const double depth = world_to_camera(cam, w).z;
    if (std::abs(depth) < 0.1) continue;
    corrs.push_back({w, project_matrix(m, w)});
  }
  std::size_t behind = 0;
  for (const auto& c : corrs) behind += world_to_camera(cam, c.world).z < 0.0 ? 1 : 0;
  ASSERT_GT(behind, 0u);
  ASSERT_LT(behind, corrs.size());
  EXPECT_EQ(code_of([&] { dlt::calibrate(corrs); }), ErrorCode::BadGeometry);
}

TEST(Calibrate, WorldOriginBehindCameraStillCalibrates) {
  // Tz < 0 but every calibration point in front: the sign follows the points.
  Draw d(70);
  const Camera cam{CameraIntrinsics(900, 900, 400, 300),
                   {Rotation3::identity(), {0.0, 0.0, -5.0}}};
  std::vector<dlt::Correspondence> corrs;
  for (int i = 0; i < 10; ++i) {
    const Point3 w{d.uniform(-1, 1), d.uniform(-1, 1), d.uniform(8, 10)};
    corrs.push_back({w, project(cam, w)});
  }
  const auto result = dlt::calibrate(corrs);
  expect_camera_near(result.camera, cam, 1e-7, 1e-7);
}
