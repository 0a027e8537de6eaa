#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gspart/grid.h"
#include "gspart/scene.h"

namespace gspart {

inline constexpr int kManifestVersion = 1;

struct ManifestBlock {
  int block_id = 1;
  int row = 1;
  int col = 1;
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Ones();
  std::vector<int> camera_ids;  // sorted, unique
  std::size_t g_blk = 0;
  std::size_t g_vis = 0;
  double g_avgvis = 0.0;
  double area = 0.0;
  int camera_count = 0;

  bool operator==(const ManifestBlock& other) const = default;
};

struct CloudSize {
  int camera_id = 0;
  std::size_t points = 0;

  bool operator==(const CloudSize& other) const = default;
};

// Everything needed to reproduce the partition from the manifest alone.
struct ManifestProvenance {
  std::uint64_t seed = 0;
  int iterations = 0;                     // L
  std::vector<double> objective_history;  // one entry per evaluation
  double delta_scale = 0.1;
  int depth_downscale = 4;
  int stride = 2;
  double weight_floor = 0.1;
  std::string scene_path;
  std::string cams_dir;
  SceneFrame frame;
  std::vector<CloudSize> cloud_points;

  bool operator==(const ManifestProvenance& other) const = default;
};

struct PartitionManifest {
  int version = kManifestVersion;
  GridCuts cuts;
  Eigen::Vector2d delta = Eigen::Vector2d::Zero();
  double tau = 0.15;
  std::vector<ManifestBlock> blocks;
  ManifestProvenance provenance;

  bool operator==(const PartitionManifest& other) const = default;
};

// Throws kSchema when an invariant fails (grid >= 1x1, one record per
// block, sorted camera ids, regions matching cuts + delta, history <= L).
void validate_manifest(const PartitionManifest& manifest);

std::string manifest_to_json(const PartitionManifest& manifest);
PartitionManifest manifest_from_json(const std::string& text);

void write_manifest(const PartitionManifest& manifest, const std::filesystem::path& path);
PartitionManifest load_manifest(const std::filesystem::path& path);

}  // namespace gspart
