#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "gspart/depth_render.h"
#include "gspart/error.h"
#include "gspart/synthetic.h"
#include "fixtures.h"

namespace gspart {
namespace {

// Looking down +z; principal point on pixel (32, 24) at every downscale
// that divides 32 and 24.
CameraView axis_camera() {
  CameraView c;
  c.id = 1;
  c.fx = c.fy = 64.0;
  c.cx = 32.0;
  c.cy = 24.0;
  c.width = 64;
  c.height = 48;
  return c;
}

Gaussian3D splat(double depth, double opacity, double scale = 0.05) {
  Gaussian3D g;
  g.position = {0.0, 0.0, depth};
  g.scale = Eigen::Vector3d::Constant(scale);
  g.opacity = opacity;
  return g;
}

TEST(DepthRender, SingleOpaqueGaussian) {
  const CameraView cam = axis_camera();
  for (const int ds : {1, 2, 4, 8}) {
    const Gaussian3D g = splat(3.25, 1.0);
    const DepthMap d = render_depth(cam, std::span(&g, 1), ds);
    const int u = 32 / ds, v = 24 / ds;
    EXPECT_LT(std::abs(d.depth_at(u, v) - 3.25), 1e-4) << "downscale " << ds;
    EXPECT_NEAR(d.weight_at(u, v), 1.0, 1e-12);
    EXPECT_EQ(d.width, 64 / ds);
    EXPECT_EQ(d.height, 48 / ds);
  }
}

TEST(DepthRender, TwoLayerComposite) {
  // Half-opaque layers at depths 2 and 4: weights 0.5 and 0.25, D = 2.0.
  const CameraView cam = axis_camera();
  const std::vector<Gaussian3D> gs = {splat(4.0, 0.5, 0.2), splat(2.0, 0.5, 0.1)};
  const DepthMap d = render_depth(cam, gs, 4);
  EXPECT_NEAR(d.depth_at(8, 6), 2.0, 1e-4);
  EXPECT_NEAR(d.weight_at(8, 6), 0.75, 1e-4);
}

TEST(DepthRender, OcclusionStopsCompositing) {
  const CameraView cam = axis_camera();
  const std::vector<Gaussian3D> gs = {splat(5.0, 1.0, 0.2), splat(2.0, 1.0, 0.1)};
  const DepthMap d = render_depth(cam, gs, 1);
  EXPECT_NEAR(d.depth_at(32, 24), 2.0, 1e-12);
}

TEST(DepthRender, EmptyAndCulledScenesAreBlank) {
  const CameraView cam = axis_camera();
  const std::vector<Gaussian3D> gs = {splat(-2.0, 1.0), splat(2.0, 0.001)};
  const DepthMap d = render_depth(cam, gs, 4);
  EXPECT_TRUE(std::all_of(d.weight.begin(), d.weight.end(), [](double w) { return w == 0.0; }));
  const DepthMap e = render_depth(cam, {}, 4);
  EXPECT_EQ(e.depth.size(), 16u * 12u);
}

TEST(DepthRender, WeightNeverExceedsOne) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto s = generate_synthetic_scene(testing::small_config(3000, 4), seed);
    for (const auto& cam : s.cameras) {
      const DepthMap d = render_depth(cam, s.gaussians, 1);
      for (const double w : d.weight) {
        ASSERT_LE(w, 1.0);
        ASSERT_GE(w, 0.0);
      }
      checked += d.weight.size();
    }
  }
  EXPECT_GE(checked, 10000u);
}

TEST(DepthRender, InputOrderDoesNotMatter) {
  const auto s = generate_synthetic_scene(testing::small_config(1500, 4), 3);
  std::vector<Gaussian3D> shuffled = s.gaussians;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  for (const auto& cam : s.cameras) {
    const DepthMap a = render_depth(cam, s.gaussians, 2);
    const DepthMap b = render_depth(cam, shuffled, 2);
    // Equal-depth ties resolve by index, so compare loosely only there.
    for (std::size_t p = 0; p < a.depth.size(); ++p) {
      EXPECT_NEAR(a.depth[p], b.depth[p], 1e-9);
    }
  }
}

TEST(DepthRender, CounterCountsCalls) {
  reset_render_count();
  const CameraView cam = axis_camera();
  for (int i = 0; i < 5; ++i) render_depth(cam, {}, 4);
  EXPECT_EQ(render_count(), 5u);
  EXPECT_THROW(render_depth(cam, {}, 0), Error);
}

}  // namespace
}  // namespace gspart
