#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gspart/camera.h"
#include "gspart/error.h"
#include "gspart/grid.h"
#include "gspart/scene.h"
#include "fixtures.h"

namespace gspart {
namespace {

CameraView test_camera() {
  return look_at(1, {0.3, -2.0, 1.5}, {0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, 80.0, 64, 48);
}

TEST(Camera, ProjectUnprojectRoundTrip) {
  const CameraView cam = test_camera();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector3d p(u(rng), u(rng), u(rng));
    const auto proj = project_point(cam, p);
    ASSERT_TRUE(proj.has_value());
    const Eigen::Vector3d back = unproject_pixel(cam, proj->pixel, proj->depth);
    EXPECT_LT((back - p).norm(), 1e-12);
  }
}

TEST(Camera, LookAtTargetHitsPrincipalPoint) {
  const CameraView cam = test_camera();
  const auto proj = project_point(cam, Eigen::Vector3d::Zero());
  ASSERT_TRUE(proj.has_value());
  EXPECT_NEAR(proj->pixel.x(), cam.cx, 1e-9);
  EXPECT_NEAR(proj->pixel.y(), cam.cy, 1e-9);
  EXPECT_NEAR(proj->depth, std::sqrt(0.09 + 4.0 + 2.25), 1e-12);
  EXPECT_NO_THROW(cam.validate());
  // Up points toward smaller image rows.
  const auto above = project_point(cam, Eigen::Vector3d(0, 0, 0.1));
  EXPECT_LT(above->pixel.y(), cam.cy);
}

TEST(Camera, PointBehindIsRejected) {
  const CameraView cam = test_camera();
  EXPECT_FALSE(project_point(cam, cam.center()).has_value());
  EXPECT_FALSE(project_point(cam, cam.center() * 2.0).has_value());
}

TEST(Camera, ScaledIntrinsics) {
  const CameraView cam = test_camera();
  const CameraView s = cam.scaled(4);
  EXPECT_EQ(s.width, 16);
  EXPECT_EQ(s.height, 12);
  EXPECT_DOUBLE_EQ(s.fx, cam.fx / 4);
  const CameraView odd = look_at(2, {0, 0, 1}, {0, 0, 0}, {0, 1, 0}, 10, 65, 49).scaled(4);
  EXPECT_EQ(odd.width, 17);
  EXPECT_EQ(odd.height, 13);
}

TEST(Camera, ValidateRejectsBadViews) {
  CameraView cam = test_camera();
  cam.fx = 0;
  EXPECT_THROW(cam.validate(), Error);
  cam = test_camera();
  cam.rotation(0, 0) = 2.0;
  EXPECT_THROW(cam.validate(), Error);
  cam = test_camera();
  cam.z_far = cam.z_near;
  EXPECT_THROW(cam.validate(), Error);
}

TEST(Contraction, IdentityInsideUnitBall) {
  const Eigen::Vector3d p(0.3, -0.4, 0.5);
  EXPECT_EQ(contract_point(p), p);
}

TEST(Contraction, OutsideMatchesClosedForm) {
  // |x| = 4: (2 - 1/4) x / 4.
  const Eigen::Vector3d p(0.0, 4.0, 0.0);
  EXPECT_NEAR((contract_point(p) - Eigen::Vector3d(0, 1.75, 0)).norm(), 0.0, 1e-15);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 10.0);
  for (int k = 0; k < 500; ++k) {
    const Eigen::Vector3d x(n(rng), n(rng), n(rng));
    const Eigen::Vector3d c = contract_point(x);
    EXPECT_LT(c.norm(), 2.0);
    EXPECT_NEAR(c.normalized().dot(x.normalized()), 1.0, 1e-12);
  }
}

TEST(Contraction, ContinuousAndMonotoneInRadius) {
  const Eigen::Vector3d dir = Eigen::Vector3d(1, 2, 2).normalized();
  double prev = -1.0;
  for (double r = 0.0; r < 50.0; r += 0.01) {
    const double c = contract_point(r * dir).norm();
    EXPECT_GE(c, prev);
    prev = c;
  }
  EXPECT_NEAR(contract_point((1.0 + 1e-9) * dir).norm(), 1.0, 1e-8);
}

TEST(Contraction, RejectsNonFinite) {
  EXPECT_THROW(contract_point({NAN, 0, 0}), Error);
}

TEST(Frame, CenterIsMedianRadiusIsPercentile) {
  std::vector<CameraView> cams;
  // Ten cameras along x at 1..10, plus heights.
  for (int i = 1; i <= 10; ++i) {
    cams.push_back(look_at(i, {double(i), 0.0, 1.0}, {double(i), 0.0, 0.0}, {0, 1, 0}, 10, 8, 8));
  }
  const SceneFrame f = estimate_frame(cams, {}, {GroundAxes::kXY, 0.9});
  EXPECT_NEAR(f.center.x(), 5.5, 1e-12);
  EXPECT_NEAR(f.center.z(), 1.0, 1e-12);
  // Distances 0.5..4.5 (each twice); ceil(0.9*10)=9th smallest = 4.5.
  EXPECT_NEAR(f.radius, 4.5, 1e-12);
}

TEST(Frame, PrincipalAxesFollowCameraSpread) {
  std::vector<CameraView> cams;
  int id = 0;
  // Cameras spread along world Y (long) and Z (short): ground plane is YZ.
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Eigen::Vector3d eye(0.0, 2.0 * i, 0.5 * j);
      cams.push_back(look_at(++id, eye, eye + Eigen::Vector3d(1, 0, 0), {0, 0, 1}, 10, 8, 8));
    }
  }
  const SceneFrame f = estimate_frame(cams, {});
  EXPECT_NEAR(std::abs(f.axis_u.y()), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(f.axis_v.z()), 1.0, 1e-9);
  EXPECT_NEAR(f.axis_u.dot(f.axis_v), 0.0, 1e-12);
  const SceneFrame fixed = estimate_frame(cams, {}, {GroundAxes::kXZ});
  EXPECT_EQ(fixed.axis_u, Eigen::Vector3d::UnitX());
  EXPECT_EQ(fixed.axis_v, Eigen::Vector3d::UnitZ());
}

TEST(Frame, FallsBackToGaussiansWithoutCameras) {
  std::vector<Gaussian3D> gs(3);
  gs[0].position = {-2, 0, 0};
  gs[1].position = {0, 0, 0};
  gs[2].position = {2, 0, 0};
  const SceneFrame f = estimate_frame({}, gs, {GroundAxes::kXY});
  EXPECT_NEAR(f.center.x(), 0.0, 1e-12);
  EXPECT_NEAR(f.radius, 2.0, 1e-12);
  EXPECT_THROW(estimate_frame({}, {}), Error);
}

TEST(Frame, DegenerateExtentThrows) {
  std::vector<Gaussian3D> gs(4);
  for (int i = 0; i < 4; ++i) gs[i].position = {double(i), 0.0, 0.0};
  SceneFrame f;
  f.radius = 10.0;
  EXPECT_THROW(fit_grid_bounds(gs, f), Error);
}

TEST(Scene, GridCoordinatesSpanUnitSquare) {
  const auto s = generate_synthetic_scene(testing::small_config(), 5);
  const GaussianScene scene = make_scene(s.gaussians, s.cameras, {GroundAxes::kXY});
  Eigen::Vector2d lo = Eigen::Vector2d::Ones(), hi = Eigen::Vector2d::Zero();
  for (const auto& p : scene.contracted_xy()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  EXPECT_NEAR(lo.x(), 0.0, 1e-12);
  EXPECT_NEAR(lo.y(), 0.0, 1e-12);
  EXPECT_NEAR(hi.x(), 1.0, 1e-12);
  EXPECT_NEAR(hi.y(), 1.0, 1e-12);
  // Cached coordinates agree with the frame map.
  for (std::size_t i = 0; i < scene.size(); i += 97) {
    EXPECT_EQ(scene.contracted_xy()[i], scene.frame().to_grid_clamped(scene[i].position));
  }
}

TEST(Scene, GaussianValidation) {
  Gaussian3D g;
  EXPECT_NO_THROW(g.validate());
  g.opacity = 1.5;
  EXPECT_THROW(g.validate(), Error);
  g = {};
  g.scale.x() = 0.0;
  EXPECT_THROW(g.validate(), Error);
  g = {};
  g.rotation.coeffs() *= 2.0;
  EXPECT_THROW(g.validate(), Error);
}

TEST(Scene, CovarianceIsRotatedDiagonal) {
  Gaussian3D g;
  g.scale = {0.1, 0.2, 0.3};
  g.rotation = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 1, 0).normalized());
  const Eigen::Matrix3d r = g.rotation.toRotationMatrix();
  const Eigen::Matrix3d expected = r * Eigen::Vector3d(0.01, 0.04, 0.09).asDiagonal() * r.transpose();
  EXPECT_LT((g.covariance() - expected).norm(), 1e-14);
}

TEST(Grid, ValidateCuts) {
  GridCuts c{2, 2, {0.5}, {0.4}};
  EXPECT_NO_THROW(c.validate());
  EXPECT_THROW((GridCuts{2, 2, {0.5}, {}}).validate(), Error);
  EXPECT_THROW((GridCuts{3, 1, {0.6, 0.4}, {}}).validate(), Error);
  EXPECT_THROW((GridCuts{3, 1, {0.4, 0.4}, {}}).validate(), Error);
  EXPECT_THROW((GridCuts{2, 1, {1.0}, {}}).validate(), Error);
  EXPECT_THROW((GridCuts{2, 1, {0.0}, {}}).validate(), Error);
  EXPECT_THROW((GridCuts{0, 1, {}, {}}).validate(), Error);
}

TEST(Grid, FlattenRoundTrip) {
  const GridCuts c{3, 2, {0.2, 0.7}, {0.55}};
  EXPECT_EQ(c.flatten(), (std::vector<double>{0.2, 0.7, 0.55}));
  EXPECT_EQ(GridCuts::unflatten(3, 2, c.flatten()), c);
}

TEST(Grid, BlockIndexIsRowMajor) {
  EXPECT_EQ(block_index(1, 1, 3), 1);
  EXPECT_EQ(block_index(1, 3, 3), 3);
  EXPECT_EQ(block_index(2, 1, 3), 4);
  EXPECT_EQ(block_index(3, 3, 3), 9);
}

TEST(Grid, RegionsAreHalfOpenAndClosedAtOne) {
  const GridCuts c{2, 2, {0.5}, {0.25}};
  const BlockRegion r11 = block_region(c, 1, 1, Eigen::Vector2d::Zero());
  const BlockRegion r22 = block_region(c, 2, 2, Eigen::Vector2d::Zero());
  EXPECT_TRUE(r11.contains({0.0, 0.0}));
  EXPECT_FALSE(r11.contains({0.5, 0.1}));
  EXPECT_FALSE(r11.contains({0.1, 0.25}));
  EXPECT_TRUE(r22.contains({0.5, 0.25}));
  EXPECT_TRUE(r22.contains({1.0, 1.0}));
  EXPECT_DOUBLE_EQ(r22.area(), 0.5 * 0.75);
  EXPECT_EQ(r22.block_id, 4);
}

TEST(Grid, CellsPartitionTheSquare) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GridCuts c = testing::random_cuts(3, 4, rng);
    const auto regions = block_regions(c, Eigen::Vector2d::Zero());
    double area = 0.0;
    for (const auto& r : regions) area += r.area();
    EXPECT_NEAR(area, 1.0, 1e-12);
    for (int k = 0; k < 200; ++k) {
      // Mix interior points with points exactly on cuts and on the border.
      Eigen::Vector2d p(u(rng), u(rng));
      if (k % 5 == 0) p.x() = c.v[k % 2];
      if (k % 7 == 0) p.y() = 1.0;
      int hits = 0;
      for (const auto& r : regions) hits += r.contains(p) ? 1 : 0;
      EXPECT_EQ(hits, 1);
    }
  }
}

TEST(Grid, EnlargedRegionClampsAndChecksInput) {
  const GridCuts c{2, 2, {0.5}, {0.5}};
  const Eigen::Vector2d d = default_delta(2, 2);
  EXPECT_DOUBLE_EQ(d.x(), 0.05);
  const BlockRegion r = block_region(c, 1, 2, d);
  EXPECT_DOUBLE_EQ(r.lo.x(), 0.0);
  EXPECT_DOUBLE_EQ(r.hi.x(), 0.55);
  EXPECT_DOUBLE_EQ(r.lo.y(), 0.45);
  EXPECT_DOUBLE_EQ(r.hi.y(), 1.0);
  EXPECT_THROW(block_region(c, 3, 1, d), Error);
  EXPECT_THROW(block_region(c, 1, 1, Eigen::Vector2d(-0.1, 0.0)), Error);
}

}  // namespace
}  // namespace gspart
