#include <random>

#include <gtest/gtest.h>

#include "gspart/error.h"
#include "gspart/visibility.h"
#include "fixtures.h"

namespace gspart {
namespace {

// Camera at the origin looking down +z, 100x80, f = 50.
CameraView forward_camera() {
  CameraView c;
  c.id = 1;
  c.fx = c.fy = 50.0;
  c.cx = 49.5;
  c.cy = 39.5;
  c.width = 100;
  c.height = 80;
  return c;
}

Gaussian3D at(double x, double y, double z, double scale = 0.01, double opacity = 1.0) {
  Gaussian3D g;
  g.position = {x, y, z};
  g.scale = Eigen::Vector3d::Constant(scale);
  g.opacity = opacity;
  return g;
}

TEST(Predicate, BasicCases) {
  const CameraView cam = forward_camera();
  EXPECT_TRUE(is_visible(cam, at(0, 0, 2)));
  EXPECT_FALSE(is_visible(cam, at(0, 0, -2)));
  EXPECT_FALSE(is_visible(cam, at(0, 0, 0.005)));   // before z_near
  EXPECT_FALSE(is_visible(cam, at(0, 0, 2000)));    // past z_far
  EXPECT_FALSE(is_visible(cam, at(0, 0, 2, 0.01, 0.004)));
  EXPECT_TRUE(is_visible(cam, at(0, 0, 2, 0.01, kOpacityFloor)));
}

TEST(Predicate, FootprintDilatesTheImageRectangle) {
  const CameraView cam = forward_camera();
  // At depth 1 a point at x projects to 49.5 + 50x. Image right edge is 100;
  // scale 0.1 gives r = 3*0.1*50 = 15 px, so centers up to u = 115 count.
  const double x_in = (114.0 - 49.5) / 50.0;
  const double x_out = (116.0 - 49.5) / 50.0;
  EXPECT_TRUE(is_visible(cam, at(x_in, 0, 1, 0.1)));
  EXPECT_FALSE(is_visible(cam, at(x_out, 0, 1, 0.1)));
  EXPECT_FALSE(is_visible(cam, at(x_in, 0, 1, 0.01)));
}

TEST(Matrix, RowsMatchScalarPredicate) {
  const auto s = generate_synthetic_scene(testing::small_config(2000, 12), 6);
  const VisibilityMatrix m = visibility_matrix(s.gaussians, s.cameras);
  ASSERT_EQ(m.camera_count(), s.cameras.size());
  ASSERT_EQ(m.gaussian_count(), s.gaussians.size());
  for (std::size_t c = 0; c < s.cameras.size(); ++c) {
    EXPECT_EQ(m.camera_ids()[c], s.cameras[c].id);
    for (std::size_t g = 0; g < s.gaussians.size(); ++g) {
      ASSERT_EQ(m.row(c).test(g), is_visible(s.cameras[c], s.gaussians[g]));
    }
  }
  EXPECT_EQ(&m.row_for_id(s.cameras[3].id), &m.row(3));
  EXPECT_THROW(m.row_for_id(-5), Error);
  EXPECT_THROW(visibility_matrix(s.gaussians, {}), Error);
}

TEST(Matrix, BlockUnionAndStatsAgreeWithOracle) {
  const auto s = generate_synthetic_scene(testing::small_config(2000, 12), 9);
  const GaussianScene scene = s.scene();
  const VisibilityMatrix m = visibility_matrix(scene.gaussians(), s.cameras);
  std::mt19937_64 rng(4);
  const GridCuts cuts = testing::random_cuts(2, 3, rng);
  // Arbitrary assignment: camera k goes to blocks k % 6 and (k + 2) % 6; block 6 stays empty.
  CameraAssignment assignment(6);
  for (std::size_t k = 0; k < s.cameras.size(); ++k) {
    for (const std::size_t b : {k % 5, (k + 2) % 5}) assignment[b].push_back(s.cameras[k].id);
  }
  for (auto& ids : assignment) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  const auto stats = block_stats(scene, m, cuts, assignment);
  ASSERT_EQ(stats.size(), 6u);
  for (int b = 0; b < 6; ++b) {
    const int i = b / 3 + 1, j = b % 3 + 1;
    const double v0 = cuts.v_at(i - 1), v1 = cuts.v_at(i), h0 = cuts.h_at(j - 1), h1 = cuts.h_at(j);
    std::size_t g_blk = 0, g_vis = 0;
    for (std::size_t g = 0; g < scene.size(); ++g) {
      const auto p = scene.contracted_xy()[g];
      const bool in_u = p.x() >= v0 && (p.x() < v1 || (v1 == 1.0 && p.x() <= 1.0));
      const bool in_v = p.y() >= h0 && (p.y() < h1 || (h1 == 1.0 && p.y() <= 1.0));
      g_blk += in_u && in_v;
      bool seen = false;
      for (const int id : assignment[b]) {
        for (const auto& c : s.cameras) seen |= c.id == id && is_visible(c, scene[g]);
      }
      g_vis += seen;
    }
    EXPECT_EQ(stats[b].block_id, b + 1);
    EXPECT_EQ(stats[b].g_blk, g_blk) << "block " << b + 1;
    EXPECT_EQ(stats[b].g_vis, g_vis) << "block " << b + 1;
    EXPECT_EQ(stats[b].camera_count, static_cast<int>(assignment[b].size()));
    EXPECT_NEAR(stats[b].area, (v1 - v0) * (h1 - h0), 1e-15);
    if (assignment[b].empty()) {
      EXPECT_EQ(stats[b].g_avgvis, 0.0);
    } else {
      EXPECT_DOUBLE_EQ(stats[b].g_avgvis, double(g_vis) / assignment[b].size());
    }
  }
  EXPECT_EQ(stats[5].g_vis, 0u);
}

TEST(Matrix, InBlockSetsPartitionTheScene) {
  const auto s = generate_synthetic_scene(testing::small_config(1500, 9), 12);
  const GaussianScene scene = s.scene();
  std::mt19937_64 rng(8);
  const GridCuts cuts = testing::random_cuts(3, 3, rng);
  IndexSet all(scene.size());
  std::size_t total = 0;
  for (const auto& r : block_regions(cuts, Eigen::Vector2d::Zero())) {
    const IndexSet in = gaussians_in_block(scene, r);
    EXPECT_FALSE(all.intersects(in));
    all |= in;
    total += in.count();
  }
  EXPECT_EQ(total, scene.size());
}

}  // namespace
}  // namespace gspart
