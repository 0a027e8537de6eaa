#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "gspart/block_pipeline.h"
#include "gspart/depth_render.h"
#include "gspart/error.h"
#include "gspart/partition.h"
#include "fixtures.h"

namespace gspart {
namespace {

struct Fixture {
  SyntheticScene synth;
  GaussianScene scene;
  VisibilityMatrix matrix;
  explicit Fixture(std::uint64_t seed, int gaussians = 2000, int cams = 16) {
    synth = generate_synthetic_scene(testing::small_config(gaussians, cams), seed);
    scene = synth.scene();
    matrix = visibility_matrix(scene.gaussians(), synth.cameras);
  }
};

BlockRegion cell(const GridCuts& cuts, int i, int j) {
  return block_region(cuts, i, j, Eigen::Vector2d::Zero());
}

TEST(Crop, KeepsExactlyTheVisibleSet) {
  const Fixture f(1);
  const GridCuts cuts{2, 2, {0.5}, {0.5}};
  const std::vector<int> ids = {f.synth.cameras[0].id, f.synth.cameras[5].id};
  const BlockRegion r = cell(cuts, 1, 2);
  const BlockSubScene sub = visibility_crop(f.scene, f.matrix, ids, r);
  const IndexSet visible = visible_gaussians_for_block(f.matrix, ids);
  const IndexSet inside = gaussians_in_block(f.scene, r);
  ASSERT_EQ(sub.size(), visible.count());
  EXPECT_EQ(sub.block_id, 2);
  std::size_t k = 0;
  for (auto i = visible.find_first(); i != IndexSet::npos; i = visible.find_next(i), ++k) {
    EXPECT_EQ(sub.origin_index[k], static_cast<std::int64_t>(i));
    EXPECT_EQ(sub.gaussians[k], f.scene[i]);
    EXPECT_EQ(sub.in_block[k], inside.test(i));
    EXPECT_EQ(sub.densify_eligible[k], sub.in_block[k]);
  }
  EXPECT_NO_THROW(sub.validate());
}

TEST(Crop, EmptyCameraSetGivesEmptySubScene) {
  const Fixture f(2, 500, 4);
  set_warnings_enabled(false);
  const BlockSubScene sub = visibility_crop(f.scene, f.matrix, {}, BlockRegion{});
  set_warnings_enabled(true);
  EXPECT_EQ(sub.size(), 0u);
}

TEST(Crop, RendersIdenticallyForAssignedCameras) {
  const Fixture f(3);
  const PartitionProblem problem(f.scene, f.synth.cameras);
  const GridCuts cuts{2, 2, {0.45}, {0.55}};
  const ObjectiveResult obj = evaluate_objective(problem, cuts, default_delta(2, 2), 0.15);
  for (int b = 0; b < 4; ++b) {
    const BlockSubScene sub =
        visibility_crop(f.scene, f.matrix, obj.assignment[b], cell(cuts, b / 2 + 1, b % 2 + 1));
    for (const int id : obj.assignment[b]) {
      const CameraView& cam = f.synth.cameras[static_cast<std::size_t>(id - 1)];
      ASSERT_EQ(cam.id, id);
      EXPECT_TRUE(render_depth(cam, sub.gaussians, 2) == render_depth(cam, f.scene.gaussians(), 2));
    }
  }
}

BlockSubScene mixed_sub(int in, int out) {
  BlockSubScene sub;
  sub.cell.lo = {0.0, 0.0};
  sub.cell.hi = {0.5, 1.0};
  SceneFrame& fr = sub.frame;
  fr.radius = 100.0;
  fr.lo = {-0.01, -0.01};
  fr.hi = {0.01, 0.01};  // grid = (x/100 + 0.01) / 0.02: x in [-1, 1] -> [0, 1]
  for (int k = 0; k < in + out; ++k) {
    Gaussian3D g;
    g.position = {k < in ? -0.5 : 0.5, 0.1 * k - 0.5, 0.0};
    g.scale = Eigen::Vector3d::Constant(k % 2 ? 0.05 : 0.005);
    sub.gaussians.push_back(g);
    sub.origin_index.push_back(k);
    sub.in_block.push_back(k < in);
    sub.densify_eligible.push_back(k < in);
  }
  return sub;
}

TEST(Densify, MaskIsInBlock) {
  EXPECT_EQ(selective_densify_mask(mixed_sub(6, 4)),
            (std::vector<bool>{true, true, true, true, true, true, false, false, false, false}));
  const auto all_in = selective_densify_mask(mixed_sub(5, 0));
  EXPECT_TRUE(std::all_of(all_in.begin(), all_in.end(), [](bool b) { return b; }));
  const auto all_out = selective_densify_mask(mixed_sub(0, 5));
  EXPECT_TRUE(std::none_of(all_out.begin(), all_out.end(), [](bool b) { return b; }));
}

TEST(Densify, BelowThresholdIsNoOp) {
  const BlockSubScene sub = mixed_sub(6, 4);
  std::mt19937_64 rng(1);
  const std::vector<double> g(sub.size(), 0.1);
  const BlockSubScene out = simulate_densify_step(sub, g, DensifyConfig{}, rng);
  EXPECT_EQ(out.gaussians, sub.gaussians);
  EXPECT_EQ(out.origin_index, sub.origin_index);
}

TEST(Densify, SplitReplacesParentWithTwoSmallerChildren) {
  BlockSubScene sub = mixed_sub(2, 0);  // index 1 is large (0.05)
  std::mt19937_64 rng(2);
  DensifyStats stats;
  const BlockSubScene out = simulate_densify_step(sub, std::vector<double>{0.0, 1.0},
                                                  DensifyConfig{}, rng, &stats);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(stats.split, 1u);
  EXPECT_EQ(out.gaussians[0], sub.gaussians[0]);
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_EQ(out.origin_index[k], -1);
    EXPECT_LT((out.gaussians[k].scale - sub.gaussians[1].scale / 1.6).norm(), 1e-15);
  }
  EXPECT_NO_THROW(out.validate());
}

TEST(Densify, CloneKeepsParentAndAppendsJitteredCopy) {
  BlockSubScene sub = mixed_sub(1, 0);  // small (0.005)
  std::mt19937_64 rng(3);
  DensifyStats stats;
  const BlockSubScene out =
      simulate_densify_step(sub, std::vector<double>{0.9}, DensifyConfig{}, rng, &stats);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(stats.cloned, 1u);
  EXPECT_EQ(out.gaussians[0], sub.gaussians[0]);
  EXPECT_EQ(out.origin_index[1], -1);
  EXPECT_EQ(out.gaussians[1].scale, sub.gaussians[0].scale);
  EXPECT_LT((out.gaussians[1].position - sub.gaussians[0].position).norm(), 0.005);
  ASSERT_EQ(stats.created_from.size(), 1u);
  EXPECT_EQ(stats.created_from[0], (std::pair<std::size_t, std::size_t>{1, 0}));
}

TEST(Densify, OutOfBlockNeverTouched) {
  const BlockSubScene sub = mixed_sub(3, 5);
  std::mt19937_64 rng(4);
  const std::vector<double> huge(sub.size(), 1e9);
  DensifyStats stats;
  const BlockSubScene out = simulate_densify_step(sub, huge, DensifyConfig{}, rng, &stats);
  std::vector<Gaussian3D> kept;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (out.origin_index[k] >= 3) kept.push_back(out.gaussians[k]);
  }
  EXPECT_EQ(kept, std::vector<Gaussian3D>(sub.gaussians.begin() + 3, sub.gaussians.end()));
  for (const auto& [child, parent] : stats.created_from) EXPECT_TRUE(sub.in_block[parent]);
  // At most doubles the eligible subset.
  EXPECT_LE(out.size(), sub.size() + 3);
  EXPECT_THROW(simulate_densify_step(sub, std::vector<double>{1.0}, DensifyConfig{}, rng), Error);
}

TEST(Prune, KeepsCellMembersOnly) {
  const Fixture f(5);
  const GridCuts cuts{2, 2, {0.4}, {0.6}};
  std::vector<int> all_ids;
  for (const auto& c : f.synth.cameras) all_ids.push_back(c.id);
  const BlockRegion r = cell(cuts, 2, 1);
  const BlockSubScene sub = visibility_crop(f.scene, f.matrix, all_ids, r);
  const BlockSubScene pruned = prune_outside(sub, r);
  const IndexSet inside = gaussians_in_block(f.scene, r);
  std::set<std::int64_t> expect, got(pruned.origin_index.begin(), pruned.origin_index.end());
  const IndexSet visible = visible_gaussians_for_block(f.matrix, all_ids);
  for (auto i = inside.find_first(); i != IndexSet::npos; i = inside.find_next(i)) {
    if (visible.test(i)) expect.insert(static_cast<std::int64_t>(i));
  }
  EXPECT_EQ(got, expect);
  EXPECT_EQ(prune_outside(pruned, r).gaussians, pruned.gaussians);
  BlockRegion empty_cell;
  empty_cell.lo = {2.0, 2.0};
  empty_cell.hi = {3.0, 3.0};
  EXPECT_EQ(prune_outside(sub, empty_cell).size(), 0u);
}

TEST(Merge, DetectsDuplicatesFromEnlargedPruning) {
  const Fixture f(6);
  const GridCuts cuts{2, 1, {0.5}, {}};
  std::vector<int> ids;
  for (const auto& c : f.synth.cameras) ids.push_back(c.id);
  const Eigen::Vector2d delta = default_delta(2, 1);
  std::vector<BlockSubScene> subs;
  for (int i = 1; i <= 2; ++i) {
    const BlockSubScene sub = visibility_crop(f.scene, f.matrix, ids, cell(cuts, i, 1));
    subs.push_back(prune_outside(sub, block_region(cuts, i, 1, delta)));
  }
  try {
    merge_blocks(subs);
    FAIL() << "expected a merge-integrity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMergeIntegrity);
  }
}

TEST(Merge, OneByOneIsTheCrop) {
  const Fixture f(7, 800, 6);
  std::vector<int> ids;
  for (const auto& c : f.synth.cameras) ids.push_back(c.id);
  const GridCuts cuts{1, 1, {}, {}};
  const BlockSubScene sub = visibility_crop(f.scene, f.matrix, ids, cell(cuts, 1, 1));
  std::vector<std::int64_t> origins;
  const std::vector<BlockSubScene> subs = {prune_outside(sub, cell(cuts, 1, 1))};
  EXPECT_EQ(merge_blocks(subs, &origins), sub.gaussians);
  EXPECT_EQ(origins, sub.origin_index);
}

TEST(Sidecar, RoundTrip) {
  const auto dir = testing::temp_dir("sidecar");
  BlockSubScene sub = mixed_sub(4, 3);
  sub.block_id = 5;
  sub.cell.block_id = 5;
  sub.cell.row = 2;
  sub.cell.col = 2;
  sub.origin_index[2] = -1;
  save_block(sub, dir / "block_5.ply");
  EXPECT_TRUE(std::filesystem::exists(dir / "block_5.json"));
  const BlockSubScene back = load_block(dir / "block_5.ply");
  EXPECT_EQ(back.block_id, 5);
  EXPECT_EQ(back.origin_index, sub.origin_index);
  EXPECT_EQ(back.in_block, sub.in_block);
  EXPECT_EQ(back.densify_eligible, sub.densify_eligible);
  EXPECT_EQ(back.cell.row, 2);
  EXPECT_EQ(back.cell.hi, sub.cell.hi);
  EXPECT_EQ(back.frame, sub.frame);
  ASSERT_EQ(back.size(), sub.size());
  for (std::size_t k = 0; k < sub.size(); ++k) {
    EXPECT_LT((back.gaussians[k].position - sub.gaussians[k].position).norm(), 1e-7);
  }
}

TEST(SubScene, ValidateCatchesBrokenInvariants) {
  BlockSubScene sub = mixed_sub(2, 2);
  sub.densify_eligible[3] = true;
  EXPECT_THROW(sub.validate(), Error);
  sub = mixed_sub(2, 2);
  sub.origin_index[1] = 0;
  EXPECT_THROW(sub.validate(), Error);
  sub = mixed_sub(2, 2);
  sub.in_block.pop_back();
  EXPECT_THROW(sub.validate(), Error);
}

}  // namespace
}  // namespace gspart
