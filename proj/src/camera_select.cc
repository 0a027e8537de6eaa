#include "gspart/camera_select.h"

#include <algorithm>

#include "gspart/error.h"
#include "gspart/parallel.h"

namespace gspart {

BackprojectedCloud backproject(const CameraView& cam, const DepthMap& dmap,
                               const SceneFrame& frame, int stride, double weight_floor) {
  if (stride < 1) throw Error(ErrorCode::kInvalidInput, "stride must be >= 1");
  const CameraView view = cam.scaled(dmap.downscale);
  BackprojectedCloud cloud;
  cloud.camera_id = cam.id;
  for (int v = 0; v < dmap.height; v += stride) {
    for (int u = 0; u < dmap.width; u += stride) {
      const double w = dmap.weight_at(u, v);
      if (!(w >= weight_floor) || !(w > 0.0)) continue;
      const double z = dmap.depth_at(u, v) / w;
      const Eigen::Vector3d world = unproject_pixel(view, Eigen::Vector2d(u, v), z);
      cloud.points.push_back(frame.to_grid_clamped(world));
    }
  }
  return cloud;
}

std::vector<BackprojectedCloud> compute_clouds(const GaussianScene& scene,
                                               std::span<const CameraView> cameras,
                                               const CameraSelectOptions& options) {
  std::vector<BackprojectedCloud> clouds(cameras.size());
  parallel_for(cameras.size(), [&](std::size_t c) {
    const DepthMap dmap = render_depth(cameras[c], scene.gaussians(), options.depth_downscale);
    clouds[c] = backproject(cameras[c], dmap, scene.frame(), options.stride, options.weight_floor);
  });
  for (const auto& cloud : clouds) {
    if (cloud.points.empty()) {
      warn("camera " + std::to_string(cloud.camera_id) +
           " back-projects no points and joins no block");
    }
  }
  return clouds;
}

double visibility_ratio(const BackprojectedCloud& cloud, const BlockRegion& region) {
  if (cloud.points.empty()) return 0.0;
  std::size_t inside = 0;
  for (const auto& p : cloud.points) inside += region.contains(p) ? 1 : 0;
  return static_cast<double>(inside) / static_cast<double>(cloud.points.size());
}

CameraAssignment assign_cameras(std::span<const BackprojectedCloud> clouds,
                                const GridCuts& cuts, const Eigen::Vector2d& delta, double tau) {
  cuts.validate();
  const auto regions = block_regions(cuts, delta);
  CameraAssignment out(regions.size());
  for (const auto& cloud : clouds) {
    if (cloud.points.empty()) continue;
    for (std::size_t b = 0; b < regions.size(); ++b) {
      if (visibility_ratio(cloud, regions[b]) >= tau) out[b].push_back(cloud.camera_id);
    }
  }
  for (auto& ids : out) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return out;
}

CameraAssignment assign_cameras_by_block_render(const GaussianScene& scene,
                                                std::span<const CameraView> cameras,
                                                const GridCuts& cuts,
                                                const Eigen::Vector2d& delta,
                                                const CameraSelectOptions& options) {
  cuts.validate();
  const auto regions = block_regions(cuts, delta);
  std::vector<std::vector<Gaussian3D>> block_scenes(regions.size());
  for (std::size_t b = 0; b < regions.size(); ++b) {
    for (std::size_t i = 0; i < scene.size(); ++i) {
      if (regions[b].contains(scene.contracted_xy()[i])) block_scenes[b].push_back(scene[i]);
    }
  }
  auto covered = [&](const DepthMap& d) {
    std::size_t n = 0;
    for (const double w : d.weight) n += w >= options.weight_floor ? 1 : 0;
    return n;
  };
  CameraAssignment out(regions.size());
  for (const auto& cam : cameras) {
    const std::size_t full = covered(render_depth(cam, scene.gaussians(), options.depth_downscale));
    for (std::size_t b = 0; b < regions.size(); ++b) {
      const std::size_t part =
          covered(render_depth(cam, block_scenes[b], options.depth_downscale));
      if (full > 0 && static_cast<double>(part) / static_cast<double>(full) >= options.tau) {
        out[b].push_back(cam.id);
      }
    }
  }
  for (auto& ids : out) std::sort(ids.begin(), ids.end());
  return out;
}

}  // namespace gspart
