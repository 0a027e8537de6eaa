#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gspart/camera.h"
#include "gspart/scene.h"

namespace gspart {

// Alpha-blended expected depth D = sum_i d_i a_i prod_{j<i}(1 - a_j) and
// the accumulated blending weight per pixel, row-major.
struct DepthMap {
  int width = 0;
  int height = 0;
  int downscale = 1;
  std::vector<double> depth;
  std::vector<double> weight;

  double depth_at(int u, int v) const { return depth[static_cast<std::size_t>(v) * width + u]; }
  double weight_at(int u, int v) const { return weight[static_cast<std::size_t>(v) * width + u]; }

  bool operator==(const DepthMap& other) const = default;
};

struct DepthRenderOptions {
  double transmittance_floor = 1e-4;  // stop compositing below this
  double dilation = 0.3;              // px^2 added to the projected covariance
};

// Splats the Gaussians that pass is_visible() for the full-resolution camera,
// sorted front to back by center depth (ties by index), with EWA-projected
// footprints at 1/downscale resolution. Increments the render counter.
DepthMap render_depth(const CameraView& cam, std::span<const Gaussian3D> gaussians,
                      int downscale = 4, const DepthRenderOptions& options = {});

// Number of render_depth calls since the last reset (process-wide).
std::uint64_t render_count();
void reset_render_count();

}  // namespace gspart
