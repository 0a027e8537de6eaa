#include <algorithm>

#include <gtest/gtest.h>

#include "gspart/depth_render.h"
#include "gspart/error.h"
#include "gspart/manifest.h"
#include "gspart/partition.h"
#include "fixtures.h"

namespace gspart {
namespace {

struct Fixture {
  SyntheticScene synth;
  GaussianScene scene;
  Fixture(std::uint64_t seed, double skew = 2.0) {
    SyntheticSceneConfig cfg = testing::small_config(2500, 16);
    cfg.cluster_skew = skew;
    synth = generate_synthetic_scene(cfg, seed);
    scene = synth.scene();
  }
};

TEST(Partition, UniformCuts) {
  const GridCuts c = init_uniform_cuts(4, 3);
  EXPECT_EQ(c.v, (std::vector<double>{0.25, 0.5, 0.75}));
  ASSERT_EQ(c.h.size(), 2u);
  EXPECT_DOUBLE_EQ(c.h[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.h[1], 2.0 / 3.0);
  EXPECT_TRUE(init_uniform_cuts(1, 1).v.empty());
}

TEST(Partition, ObjectiveIsMaxVisibleCount) {
  const Fixture f(1);
  const PartitionProblem problem(f.scene, f.synth.cameras);
  const GridCuts cuts{2, 2, {0.45}, {0.6}};
  const ObjectiveResult r = evaluate_objective(problem, cuts, default_delta(2, 2), 0.15);
  ASSERT_EQ(r.stats.size(), 4u);
  std::size_t mx = 0;
  for (const auto& s : r.stats) mx = std::max(mx, s.g_vis);
  EXPECT_EQ(r.value, mx);
  EXPECT_EQ(r.assignment,
            assign_cameras(problem.clouds(), cuts, default_delta(2, 2), 0.15));
}

TEST(Partition, LoopBookkeeping) {
  const Fixture f(2);
  reset_render_count();
  const PartitionProblem problem(f.scene, f.synth.cameras);
  PartitionOptions opt;
  opt.iterations = 25;
  opt.seed = 11;
  const PartitionResult r = optimize_partition(problem, opt);
  // One render per camera, none inside the loop.
  EXPECT_EQ(render_count(), f.synth.cameras.size());

  const BOState& s = r.state;
  ASSERT_EQ(s.y.size(), 25u);
  ASSERT_EQ(s.x.size(), 25u);
  EXPECT_EQ(s.iteration, 25);
  EXPECT_EQ(s.x.front(), init_uniform_cuts(2, 2).flatten());
  EXPECT_EQ(r.uniform_value, static_cast<std::size_t>(s.y.front()));
  EXPECT_TRUE(std::is_sorted(s.best_history.rbegin(), s.best_history.rend()));
  EXPECT_EQ(s.best_y, *std::min_element(s.y.begin(), s.y.end()));
  EXPECT_LE(r.best.value, r.uniform_value);
  EXPECT_EQ(static_cast<double>(r.best.value), s.best_y);
  // The incumbent is the first evaluation reaching the minimum.
  const auto first = std::find(s.y.begin(), s.y.end(), s.best_y) - s.y.begin();
  EXPECT_EQ(s.best_x, s.x[static_cast<std::size_t>(first)]);
  EXPECT_EQ(r.cuts, GridCuts::unflatten(2, 2, s.best_x));
  const CutBounds b = CutBounds::around_uniform(2, 2);
  for (const auto& x : s.x) EXPECT_TRUE(b.contains(x));
  // The reported best agrees with a fresh evaluation.
  EXPECT_EQ(evaluate_objective(problem, r.cuts, r.delta, opt.tau).value, r.best.value);
}

TEST(Partition, SameSeedSameResult) {
  const Fixture f(3);
  const PartitionProblem problem(f.scene, f.synth.cameras);
  PartitionOptions opt;
  opt.iterations = 15;
  opt.seed = 5;
  const PartitionResult a = optimize_partition(problem, opt);
  const PartitionResult b = optimize_partition(problem, opt);
  EXPECT_EQ(a.state.x, b.state.x);
  EXPECT_EQ(a.state.y, b.state.y);
  const std::string ma = manifest_to_json(make_manifest(problem, a, opt, "s.ply", "cams"));
  const std::string mb = manifest_to_json(make_manifest(problem, b, opt, "s.ply", "cams"));
  EXPECT_EQ(ma, mb);
}

TEST(Partition, SingleEvaluationIsUniform) {
  const Fixture f(4);
  const PartitionProblem problem(f.scene, f.synth.cameras);
  PartitionOptions opt;
  opt.iterations = 1;
  const PartitionResult r = optimize_partition(problem, opt);
  EXPECT_EQ(r.cuts, init_uniform_cuts(2, 2));
  EXPECT_EQ(r.best.value, r.uniform_value);
  opt.iterations = 0;
  EXPECT_THROW(optimize_partition(problem, opt), Error);
}

TEST(Partition, OneByOneGridHasNothingToOptimize) {
  const Fixture f(5);
  const PartitionProblem problem(f.scene, f.synth.cameras);
  PartitionOptions opt;
  opt.m = opt.n = 1;
  opt.iterations = 10;
  const PartitionResult r = optimize_partition(problem, opt);
  EXPECT_EQ(r.state.iteration, 1);
  EXPECT_EQ(r.best.stats[0].camera_count, static_cast<int>(f.synth.cameras.size()));
}

TEST(Partition, ManifestDescribesTheResult) {
  const Fixture f(6);
  const PartitionProblem problem(f.scene, f.synth.cameras);
  PartitionOptions opt;
  opt.m = 3;
  opt.n = 2;
  opt.iterations = 12;
  const PartitionResult r = optimize_partition(problem, opt);
  const PartitionManifest m = make_manifest(problem, r, opt, "scene.ply", "cams");
  EXPECT_NO_THROW(validate_manifest(m));
  EXPECT_EQ(m.blocks.size(), 6u);
  EXPECT_EQ(m.provenance.objective_history, r.state.y);
  EXPECT_EQ(m.provenance.frame, f.scene.frame());
  EXPECT_EQ(m.provenance.cloud_points.size(), f.synth.cameras.size());
  for (std::size_t b = 0; b < 6; ++b) {
    EXPECT_EQ(m.blocks[b].camera_ids, r.best.assignment[b]);
    EXPECT_EQ(m.blocks[b].g_vis, r.best.stats[b].g_vis);
  }
}

TEST(Partition, FixedCutsEvaluateOnce) {
  const Fixture f(7);
  const PartitionProblem problem(f.scene, f.synth.cameras);
  const GridCuts cuts{2, 2, {0.4}, {0.55}};
  const PartitionResult r = evaluate_fixed_cuts(problem, cuts, PartitionOptions{});
  EXPECT_EQ(r.state.y.size(), 1u);
  EXPECT_EQ(r.cuts, cuts);
  EXPECT_THROW(evaluate_fixed_cuts(problem, GridCuts{2, 2, {0.6}, {1.2}}, PartitionOptions{}),
               Error);
}

}  // namespace
}  // namespace gspart
