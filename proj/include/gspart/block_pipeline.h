#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <vector>

#include "gspart/grid.h"
#include "gspart/scene.h"
#include "gspart/visibility.h"

namespace gspart {

// Working set of one block. `cell` is the un-enlarged grid cell and
// `frame` maps positions to grid coordinates for membership tests.
struct BlockSubScene {
  int block_id = 1;
  BlockRegion cell;
  SceneFrame frame;
  std::vector<Gaussian3D> gaussians;
  std::vector<std::int64_t> origin_index;  // -1 for densification-created primitives
  std::vector<bool> in_block;              // center inside cell at creation
  std::vector<bool> densify_eligible;      // implies in_block

  std::size_t size() const { return gaussians.size(); }
  // Throws kInvalidInput when the parallel arrays or flag invariants break.
  void validate() const;
};

// Gaussians visible from some camera in camera_ids, in original order.
// in_block / densify_eligible come from the cell. An empty camera set
// yields an empty sub-scene and a warning.
BlockSubScene visibility_crop(const GaussianScene& scene, const VisibilityMatrix& matrix,
                              std::span<const int> camera_ids, const BlockRegion& cell);

// True where densification may act: the in-block primitives.
std::vector<bool> selective_densify_mask(const BlockSubScene& sub);

struct DensifyConfig {
  double grad_threshold = 0.5;   // grad_mag >= threshold triggers densification
  double split_scale = 0.02;     // max(scale) >= this splits, below clones
  double clone_jitter = 0.1;     // clone offset std-dev, in parent scales
  double split_factor = 1.6;     // child scale = parent scale / factor
  int split_children = 2;
};

struct DensifyStats {
  std::size_t cloned = 0;
  std::size_t split = 0;
  // Per created primitive (index in the output), the parent's index in the input.
  std::vector<std::pair<std::size_t, std::size_t>> created_from;
};

// One clone/split step restricted to the selective mask. Clones keep the
// parent and append a jittered copy; splits replace the parent with
// children sampled inside its footprint. Created primitives get
// origin_index -1 and fresh in_block flags. Masked-out primitives are
// copied unchanged and keep their relative order.
BlockSubScene simulate_densify_step(const BlockSubScene& sub, std::span<const double> grad_mag,
                                    const DensifyConfig& config, std::mt19937_64& rng,
                                    DensifyStats* stats = nullptr);

// Keeps primitives whose centers lie in the (half-open) cell.
BlockSubScene prune_outside(const BlockSubScene& sub, const BlockRegion& cell);

// Concatenates pruned sub-scenes in block order. Throws kMergeIntegrity when
// an origin index appears in more than one block.
std::vector<Gaussian3D> merge_blocks(std::span<const BlockSubScene> subs,
                                     std::vector<std::int64_t>* origin_index = nullptr);

// Sub-scene on disk: <stem>.ply plus <stem>.json with block_id, origin_index,
// in_block, densify_eligible, cell and frame.
void save_block(const BlockSubScene& sub, const std::filesystem::path& ply_path);
BlockSubScene load_block(const std::filesystem::path& ply_path);
std::filesystem::path sidecar_path(const std::filesystem::path& ply_path);

}  // namespace gspart
