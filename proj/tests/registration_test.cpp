#include "mvcalib/registration.hpp"

#include <gtest/gtest.h>

#include "mvcalib/errors.hpp"
#include "test_support.hpp"

using namespace mvcalib;
using namespace mvcalib::registration;
using mvcalib::testing::Draw;

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

std::vector<Point3> random_points(Draw& d, int n) {
  std::vector<Point3> out;
  for (int i = 0; i < n; ++i) out.push_back(d.point(-1.0, 1.0));
  return out;
}

FramePair transformed_pair(const std::vector<Point3>& local, const RigidTransform& t) {
  std::vector<Point3> global;
  for (const auto& p : local) global.push_back(apply_rigid(t, p));
  return FramePair(local, global);
}

}  // namespace

TEST(FramePair, Invariants) {
  const std::vector<Point3> three{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  const std::vector<Point3> four{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  EXPECT_EQ(code_of([&] { FramePair(three, three); }), ErrorCode::TooFewPoints);
  EXPECT_EQ(code_of([&] { FramePair(four, three); }), ErrorCode::ShapeMismatch);
  EXPECT_NO_THROW(FramePair(four, four));
}

TEST(BuildDifferenceSystem, EqualFramesGiveEqualSides) {
  Draw d(71);
  const auto pts = random_points(d, 4);
  const auto [a, b] = build_difference_system(FramePair(pts, pts));
  EXPECT_EQ(a.rows(), 3);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.row(1), (pts[2].vec() - pts[0].vec()).transpose());
}

TEST(BuildDifferenceSystem, TranslationCancels) {
  Draw d(72);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_points(d, 10);
    const RigidTransform shift{Rotation3::identity(), d.vec3(-10, 10)};
    const auto [a, b] = build_difference_system(transformed_pair(pts, shift));
    EXPECT_LT((a - b).norm(), 1e-12);

    const RigidTransform t = d.transform();
    const auto base = build_difference_system(transformed_pair(pts, t));
    const RigidTransform moved{t.rotation, t.translation + d.vec3(-10, 10)};
    const auto shifted = build_difference_system(transformed_pair(pts, moved));
    EXPECT_EQ(base.first, shifted.first);
    EXPECT_LT((base.second - shifted.second).norm(), 1e-12);
  }
}

TEST(BuildDifferenceSystem, LeastSquaresSolutionIsTransposedRotation) {
  Draw d(73);
  for (int trial = 0; trial < 50; ++trial) {
    const RigidTransform t = d.transform();
    const auto [a, b] = build_difference_system(transformed_pair(random_points(d, 12), t));
    EXPECT_LT((numeric::solve_least_squares(a, b) - t.rotation.matrix().transpose()).norm(), 1e-10);
  }
}

TEST(EstimateRegistration, IdentityAndPureTranslation) {
  Draw d(74);
  const auto pts = random_points(d, 6);
  const RigidTransform id = estimate_registration(FramePair(pts, pts));
  EXPECT_LT((id.rotation.matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
  EXPECT_LT(id.translation.norm(), 1e-12);

  const RigidTransform shift{Rotation3::identity(), {1, 2, 3}};
  const RigidTransform est = estimate_registration(transformed_pair(pts, shift));
  EXPECT_LT((est.rotation.matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
  EXPECT_LT((est.translation - Eigen::Vector3d(1, 2, 3)).norm(), 1e-12);
}

TEST(EstimateRegistration, ExactOnEighteenNoiselessPoints) {
  Draw d(75);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransform t = d.transform(10.0);
    const auto pts = random_points(d, 18);
    const FramePair fp = transformed_pair(pts, t);
    const RigidTransform est = estimate_registration(fp);
    EXPECT_LT((est.rotation.matrix() - t.rotation.matrix()).norm(), 1e-9);
    EXPECT_LT((est.translation - t.translation).norm(), 1e-9);
    for (std::size_t i = 0; i < fp.size(); ++i) {
      EXPECT_LT((apply_rigid(est, fp.local()[i]).vec() - fp.global()[i].vec()).norm(), 1e-9);
    }
  }
}

TEST(EstimateRegistration, NoisyDataStillYieldsRotation) {
  Draw d(76);
  std::normal_distribution<double> noise(0.0, 0.01);
  for (int trial = 0; trial < 50; ++trial) {
    const RigidTransform t = d.transform();
    const auto pts = random_points(d, 18);
    std::vector<Point3> global;
    for (const auto& p : pts) {
      Point3 g = apply_rigid(t, p);
      g.x += noise(d.engine());
      g.y += noise(d.engine());
      g.z += noise(d.engine());
      global.push_back(g);
    }
    const RigidTransform est = estimate_registration(FramePair(pts, global));
    EXPECT_LT(est.rotation.orthogonality_error(), 1e-9);
    EXPECT_NEAR(est.rotation.matrix().determinant(), 1.0, 1e-9);
    EXPECT_LT((est.rotation.matrix() - t.rotation.matrix()).norm(), 0.1);
  }
}

TEST(EstimateRegistration, CollinearPointsAreDegenerate) {
  std::vector<Point3> line;
  for (int i = 0; i < 6; ++i) line.push_back({1.0 * i, 2.0 * i, -1.0 * i});
  EXPECT_EQ(code_of([&] { estimate_registration(FramePair(line, line)); }),
            ErrorCode::DegenerateGeometry);
  std::vector<Point3> same(5, Point3{1, 1, 1});
  EXPECT_EQ(code_of([&] { estimate_registration(FramePair(same, same)); }),
            ErrorCode::DegenerateGeometry);
}

TEST(RegisterCamera, IdentityFrameLeavesCameraUnchanged) {
  Draw d(77);
  const Camera cam = d.camera();
  const RegisteredCamera rc = register_camera(cam, RigidTransform::identity());
  EXPECT_EQ(rc.camera.intrinsics, cam.intrinsics);
  EXPECT_LT((rc.camera.extrinsics.rotation.matrix() - cam.extrinsics.rotation.matrix()).norm(), 1e-15);
  EXPECT_LT((rc.camera.extrinsics.translation - cam.extrinsics.translation).norm(), 1e-15);
}

TEST(RegisterCamera, ProjectionOfMappedPointsIsPreserved) {
  Draw d(78);
  {
    const Camera cam = d.camera();
    const Eigen::Vector3d t(0.3, -0.2, 0.1);
    const RegisteredCamera rc = register_camera(cam, {Rotation3::identity(), t});
    const Point3 p = d.point(-1, 1);
    const Point2 a = project(rc.camera, Point3::from(p.vec() + t));
    const Point2 b = project(cam, p);
    EXPECT_NEAR(a.u, b.u, 1e-9);
    EXPECT_NEAR(a.v, b.v, 1e-9);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const Camera cam = d.camera();
    const RigidTransform frame = d.transform();
    const RegisteredCamera rc = register_camera(cam, frame);
    EXPECT_EQ(rc.camera.intrinsics, cam.intrinsics);  // bit-for-bit
    for (int i = 0; i < 100; ++i) {
      const Point3 p_local = d.point(-1, 1);
      const Point2 a = project(rc.camera, apply_rigid(frame, p_local));
      const Point2 b = project(cam, p_local);
      EXPECT_NEAR(a.u, b.u, 1e-9 * std::max(1.0, std::abs(b.u)));
      EXPECT_NEAR(a.v, b.v, 1e-9 * std::max(1.0, std::abs(b.v)));
    }
  }
}

TEST(RoundHalfAway, Convention) {
  EXPECT_EQ(round_half_away({2.5, -2.5}), (Point2{3, -3}));
  EXPECT_EQ(round_half_away({0.49, -0.51}), (Point2{0, -1}));
}

TEST(UnifyPoint, SingleCameraIsConsensual) {
  Draw d(79);
  const RegisteredCamera rc = register_camera(d.camera(), RigidTransform::identity());
  const Point3 p = d.point(-1, 1);
  const UnifiedPoint u = unify_point(std::span(&rc, 1), p, false);
  ASSERT_TRUE(u.has_consensus());
  EXPECT_EQ(*u.consensus, project(rc.camera, p));
  EXPECT_EQ(u.max_deviation, 0.0);
  EXPECT_NO_THROW(require_consensus(u));
}

TEST(UnifyPoint, SameCameraInManyLocalFramesAgrees) {
  Draw d(80);
  for (int trial = 0; trial < 20; ++trial) {
    const Camera global_cam = d.camera();
    std::vector<RegisteredCamera> cams;
    std::vector<RegisteredCamera> unregistered;
    for (int i = 0; i < 4; ++i) {
      const RigidTransform local_to_global = d.transform();
      const Camera local{global_cam.intrinsics, compose(global_cam.extrinsics, local_to_global)};
      cams.push_back(register_camera(local, local_to_global));
      unregistered.push_back(register_camera(local, RigidTransform::identity()));
    }
    const Point3 p = d.point(-1, 1);
    const UnifiedPoint u = unify_point(cams, p, false);
    EXPECT_TRUE(u.has_consensus());
    EXPECT_LT(u.max_deviation, 1e-8);
    const UnifiedPoint rounded = unify_point(cams, p, true);
    ASSERT_TRUE(rounded.has_consensus());
    for (const auto& e : rounded.entries) EXPECT_EQ(*e.coordinate, *rounded.consensus);

    const UnifiedPoint wrong = unify_point(unregistered, p, true);
    EXPECT_FALSE(wrong.has_consensus());
    EXPECT_EQ(code_of([&] { require_consensus(wrong); }), ErrorCode::NoConsensus);
  }
}

TEST(UnifyPoint, OrderIndependent) {
  Draw d(81);
  std::vector<RegisteredCamera> cams;
  for (int i = 0; i < 4; ++i) cams.push_back(register_camera(d.camera(), d.transform()));
  const Point3 p = d.point(-1, 1);
  const UnifiedPoint a = unify_point(cams, p, false);
  std::reverse(cams.begin(), cams.end());
  const UnifiedPoint b = unify_point(cams, p, false);
  EXPECT_DOUBLE_EQ(a.max_deviation, b.max_deviation);
  EXPECT_EQ(a.has_consensus(), b.has_consensus());
  EXPECT_EQ(*a.entries.front().coordinate, *b.entries.back().coordinate);
}

TEST(UnifyPoint, BehindCameraIsReportedPerEntry) {
  const RegisteredCamera front{Camera{}, {}};
  const RegisteredCamera flipped{
      Camera{CameraIntrinsics(), {Rotation3(Eigen::Vector3d(1, -1, -1).asDiagonal().toDenseMatrix()),
                                  Eigen::Vector3d::Zero()}},
      {}};
  const std::vector<RegisteredCamera> cams{front, flipped};
  const UnifiedPoint u = unify_point(cams, {0, 0, 2}, true);
  EXPECT_TRUE(u.entries[0].coordinate.has_value());
  ASSERT_TRUE(u.entries[1].error.has_value());
  EXPECT_EQ(*u.entries[1].error, ErrorCode::BehindCamera);
  EXPECT_FALSE(u.has_consensus());
}

TEST(UnifyPoint, FramebufferConversionRecentres) {
  const RegisteredCamera rc{Camera{CameraIntrinsics(100, 100, 40, 30), {}}, {}};
  const SensorModel fb = SensorModel::centered(1000, 1100);
  const UnifiedPoint u = unify_point(std::span(&rc, 1), {0, 0, 1}, true, kUnifyTolerance, fb);
  EXPECT_EQ(*u.consensus, (Point2{500, 550}));
}

TEST(UnifyPoint, EmptyListRejected) {
  EXPECT_EQ(code_of([] { unify_point({}, {0, 0, 1}, false); }), ErrorCode::InvalidArgument);
}
