#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "gspart/camera.h"
#include "gspart/depth_render.h"
#include "gspart/grid.h"
#include "gspart/scene.h"
#include "gspart/visibility.h"

namespace gspart {

struct CameraSelectOptions {
  double tau = 0.15;
  int depth_downscale = 4;
  int stride = 2;
  double weight_floor = 0.1;
};

// Back-projected depth samples of one camera, in clamped grid coordinates.
struct BackprojectedCloud {
  int camera_id = 0;
  std::vector<Eigen::Vector2d> points;

  std::size_t size() const { return points.size(); }
};

// Samples every stride-th pixel of the depth map with weight >= weight_floor,
// unprojects it at the weight-normalized depth D / sum(w), and maps it
// through the scene frame.
BackprojectedCloud backproject(const CameraView& cam, const DepthMap& dmap,
                               const SceneFrame& frame, int stride, double weight_floor);

// One render + back-projection per camera (parallel over cameras).
std::vector<BackprojectedCloud> compute_clouds(const GaussianScene& scene,
                                               std::span<const CameraView> cameras,
                                               const CameraSelectOptions& options = {});

// Fraction of cloud points inside the region; 0 for an empty cloud.
double visibility_ratio(const BackprojectedCloud& cloud, const BlockRegion& region);

// c in C(b) iff visibility_ratio(c, region_b) >= tau, for regions grown by
// delta. Cameras with empty clouds join no block. No rendering.
CameraAssignment assign_cameras(std::span<const BackprojectedCloud> clouds,
                                const GridCuts& cuts, const Eigen::Vector2d& delta, double tau);

// Reference assigner that renders every view once in full and once per
// block with only the block's Gaussians, (B+1)*N renders in total. A camera
// joins block b when the block render covers at least tau of the pixels
// covered by the full render.
CameraAssignment assign_cameras_by_block_render(const GaussianScene& scene,
                                                std::span<const CameraView> cameras,
                                                const GridCuts& cuts,
                                                const Eigen::Vector2d& delta,
                                                const CameraSelectOptions& options = {});

}  // namespace gspart
