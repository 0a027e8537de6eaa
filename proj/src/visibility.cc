#include "gspart/visibility.h"

#include <algorithm>
#include <cmath>

#include "gspart/error.h"
#include "gspart/parallel.h"

namespace gspart {

bool is_visible(const CameraView& cam, const Gaussian3D& g) {
  if (!(g.opacity >= kOpacityFloor)) return false;
  const Eigen::Vector3d p = cam.to_camera(g.position);
  const double z = p.z();
  if (!(z > cam.z_near && z < cam.z_far)) return false;
  const double u = cam.fx * p.x() / z + cam.cx;
  const double v = cam.fy * p.y() / z + cam.cy;
  const double r = 3.0 * g.max_scale() / z * std::max(cam.fx, cam.fy);
  return u >= -r && u <= cam.width + r && v >= -r && v <= cam.height + r;
}

IndexSet visible_set(const CameraView& cam, std::span<const Gaussian3D> gaussians) {
  IndexSet out(gaussians.size());
  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    if (is_visible(cam, gaussians[i])) out.set(i);
  }
  return out;
}

VisibilityMatrix::VisibilityMatrix(std::vector<int> camera_ids, std::vector<IndexSet> rows,
                                   std::size_t gaussian_count)
    : camera_ids_(std::move(camera_ids)), rows_(std::move(rows)), gaussian_count_(gaussian_count) {
  if (camera_ids_.size() != rows_.size()) {
    throw Error(ErrorCode::kInvalidInput, "visibility matrix: label/row count mismatch");
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != gaussian_count_) {
      throw Error(ErrorCode::kInvalidInput, "visibility matrix: row length mismatch");
    }
    // First occurrence wins for duplicated ids.
    index_.emplace(camera_ids_[r], r);
  }
}

const IndexSet& VisibilityMatrix::row_for_id(int camera_id) const {
  const auto it = index_.find(camera_id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kInvalidId, "camera id " + std::to_string(camera_id) +
                                           " not in visibility matrix");
  }
  return rows_[it->second];
}

VisibilityMatrix visibility_matrix(std::span<const Gaussian3D> gaussians,
                                   std::span<const CameraView> cameras) {
  if (cameras.empty()) {
    throw Error(ErrorCode::kInvalidInput, "visibility matrix needs at least one camera");
  }
  std::vector<IndexSet> rows(cameras.size());
  parallel_for(cameras.size(), [&](std::size_t c) { rows[c] = visible_set(cameras[c], gaussians); });
  std::vector<int> ids;
  ids.reserve(cameras.size());
  for (const auto& cam : cameras) ids.push_back(cam.id);
  return VisibilityMatrix(std::move(ids), std::move(rows), gaussians.size());
}

IndexSet gaussians_in_block(const GaussianScene& scene, const BlockRegion& region) {
  const auto& xy = scene.contracted_xy();
  IndexSet out(xy.size());
  for (std::size_t i = 0; i < xy.size(); ++i) {
    if (region.contains(xy[i])) out.set(i);
  }
  return out;
}

IndexSet visible_gaussians_for_block(const VisibilityMatrix& matrix,
                                     std::span<const int> camera_ids) {
  IndexSet out(matrix.gaussian_count());
  for (const int id : camera_ids) out |= matrix.row_for_id(id);
  return out;
}

std::vector<BlockLoadStats> block_stats(const GaussianScene& scene,
                                        const VisibilityMatrix& matrix, const GridCuts& cuts,
                                        const CameraAssignment& assignment) {
  cuts.validate();
  if (static_cast<int>(assignment.size()) != cuts.block_count()) {
    throw Error(ErrorCode::kInvalidInput, "assignment must list every block");
  }
  const auto cells = block_regions(cuts, Eigen::Vector2d::Zero());
  std::vector<BlockLoadStats> out;
  out.reserve(cells.size());
  for (std::size_t b = 0; b < cells.size(); ++b) {
    BlockLoadStats s;
    s.block_id = cells[b].block_id;
    s.area = cells[b].area();
    s.camera_count = static_cast<int>(assignment[b].size());
    s.g_blk = gaussians_in_block(scene, cells[b]).count();
    s.g_vis = visible_gaussians_for_block(matrix, assignment[b]).count();
    s.g_avgvis = s.camera_count > 0 ? static_cast<double>(s.g_vis) / s.camera_count : 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace gspart
