#include "gspart/depth_render.h"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "gspart/error.h"
#include "gspart/visibility.h"

namespace gspart {

namespace {

std::atomic<std::uint64_t> g_render_count{0};

struct Splat {
  std::size_t index;
  double depth;
  Eigen::Vector2d mean;
  double conic_xx, conic_xy, conic_yy;
  double opacity;
  int x0, x1, y0, y1;
};

}  // namespace

std::uint64_t render_count() { return g_render_count.load(); }
void reset_render_count() { g_render_count.store(0); }

DepthMap render_depth(const CameraView& cam, std::span<const Gaussian3D> gaussians,
                      int downscale, const DepthRenderOptions& options) {
  g_render_count.fetch_add(1);
  const CameraView view = cam.scaled(downscale);
  DepthMap out;
  out.width = view.width;
  out.height = view.height;
  out.downscale = downscale;
  const auto pixels = static_cast<std::size_t>(view.width) * view.height;
  out.depth.assign(pixels, 0.0);
  out.weight.assign(pixels, 0.0);

  const double lim_x = 1.3 * (0.5 * view.width / view.fx);
  const double lim_y = 1.3 * (0.5 * view.height / view.fy);

  std::vector<Splat> splats;
  for (std::size_t i = 0; i < gaussians.size(); ++i) {
    const Gaussian3D& g = gaussians[i];
    if (!is_visible(cam, g)) continue;
    const Eigen::Vector3d t = view.to_camera(g.position);
    const double z = t.z();
    const double tx = std::clamp(t.x() / z, -lim_x, lim_x) * z;
    const double ty = std::clamp(t.y() / z, -lim_y, lim_y) * z;

    Eigen::Matrix<double, 2, 3> jac;
    jac << view.fx / z, 0.0, -view.fx * tx / (z * z),
           0.0, view.fy / z, -view.fy * ty / (z * z);
    const Eigen::Matrix<double, 2, 3> m = jac * view.rotation;
    Eigen::Matrix2d cov = m * g.covariance() * m.transpose();
    cov(0, 0) += options.dilation;
    cov(1, 1) += options.dilation;
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(0, 1);
    if (!(det > 0.0)) continue;

    Splat s;
    s.index = i;
    s.depth = z;
    s.mean = {view.fx * t.x() / z + view.cx, view.fy * t.y() / z + view.cy};
    s.conic_xx = cov(1, 1) / det;
    s.conic_xy = -cov(0, 1) / det;
    s.conic_yy = cov(0, 0) / det;
    s.opacity = g.opacity;
    const double mid = 0.5 * (cov(0, 0) + cov(1, 1));
    const double lambda_max = mid + std::sqrt(std::max(0.1, mid * mid - det));
    const double radius = std::ceil(3.0 * std::sqrt(lambda_max));
    s.x0 = std::max(0, static_cast<int>(std::floor(s.mean.x() - radius)));
    s.x1 = std::min(view.width - 1, static_cast<int>(std::ceil(s.mean.x() + radius)));
    s.y0 = std::max(0, static_cast<int>(std::floor(s.mean.y() - radius)));
    s.y1 = std::min(view.height - 1, static_cast<int>(std::ceil(s.mean.y() + radius)));
    if (s.x0 > s.x1 || s.y0 > s.y1) continue;
    splats.push_back(s);
  }
  std::sort(splats.begin(), splats.end(), [](const Splat& a, const Splat& b) {
    return a.depth < b.depth || (a.depth == b.depth && a.index < b.index);
  });

  // Front-to-back in splat order; each pixel sees its contributions in
  // depth order, identical to a per-pixel traversal.
  std::vector<double> transmittance(pixels, 1.0);
  std::vector<char> done(pixels, 0);
  for (const Splat& s : splats) {
    for (int y = s.y0; y <= s.y1; ++y) {
      for (int x = s.x0; x <= s.x1; ++x) {
        const std::size_t p = static_cast<std::size_t>(y) * view.width + x;
        if (done[p]) continue;
        const double dx = x - s.mean.x();
        const double dy = y - s.mean.y();
        const double power =
            -0.5 * (s.conic_xx * dx * dx + 2.0 * s.conic_xy * dx * dy + s.conic_yy * dy * dy);
        const double alpha = std::min(1.0, s.opacity * std::exp(std::min(0.0, power)));
        const double w = alpha * transmittance[p];
        out.depth[p] += s.depth * w;
        out.weight[p] += w;
        transmittance[p] *= 1.0 - alpha;
        if (transmittance[p] < options.transmittance_floor) done[p] = 1;
      }
    }
  }
  for (auto& w : out.weight) w = std::min(w, 1.0);
  return out;
}

}  // namespace gspart
