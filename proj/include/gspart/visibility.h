#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "gspart/camera.h"
#include "gspart/grid.h"
#include "gspart/scene.h"

namespace gspart {

using IndexSet = boost::dynamic_bitset<std::uint64_t>;

// Minimum opacity for a Gaussian to count as visible.
inline constexpr double kOpacityFloor = 0.005;

// The culling predicate shared by visibility counting and the depth
// renderer: depth in (z_near, z_far), opacity >= kOpacityFloor, and the
// projected center inside the image rectangle [0,W]x[0,H] dilated by the
// isotropic 3-sigma bound 3*max(scale)/depth*max(fx,fy).
bool is_visible(const CameraView& cam, const Gaussian3D& g);

IndexSet visible_set(const CameraView& cam, std::span<const Gaussian3D> gaussians);

// Camera x Gaussian membership, one bitset row per camera.
class VisibilityMatrix {
 public:
  VisibilityMatrix() = default;
  VisibilityMatrix(std::vector<int> camera_ids, std::vector<IndexSet> rows,
                   std::size_t gaussian_count);

  std::size_t camera_count() const { return rows_.size(); }
  std::size_t gaussian_count() const { return gaussian_count_; }
  const std::vector<int>& camera_ids() const { return camera_ids_; }
  const IndexSet& row(std::size_t r) const { return rows_[r]; }
  // Throws kInvalidId for an unknown camera id.
  const IndexSet& row_for_id(int camera_id) const;
  bool has_camera(int camera_id) const { return index_.contains(camera_id); }

 private:
  std::vector<int> camera_ids_;
  std::vector<IndexSet> rows_;
  std::unordered_map<int, std::size_t> index_;
  std::size_t gaussian_count_ = 0;
};

// Rows in camera order; built in parallel over cameras.
VisibilityMatrix visibility_matrix(std::span<const Gaussian3D> gaussians,
                                   std::span<const CameraView> cameras);

// Gaussians whose cached grid coordinates fall in the region.
IndexSet gaussians_in_block(const GaussianScene& scene, const BlockRegion& region);

// Union of the rows of the given cameras. Throws kInvalidId.
IndexSet visible_gaussians_for_block(const VisibilityMatrix& matrix,
                                     std::span<const int> camera_ids);

struct BlockLoadStats {
  int block_id = 1;
  double area = 0.0;       // un-enlarged cell area in grid space
  int camera_count = 0;
  std::size_t g_blk = 0;   // centers inside the un-enlarged cell
  std::size_t g_vis = 0;   // visible from some assigned camera
  double g_avgvis = 0.0;   // g_vis / camera_count, 0 without cameras

  bool operator==(const BlockLoadStats& other) const = default;
};

// Camera id sets per block (index b-1), each sorted ascending.
using CameraAssignment = std::vector<std::vector<int>>;

std::vector<BlockLoadStats> block_stats(const GaussianScene& scene,
                                        const VisibilityMatrix& matrix, const GridCuts& cuts,
                                        const CameraAssignment& assignment);

}  // namespace gspart
