#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gspart/camera.h"
#include "gspart/scene.h"

namespace gspart {

enum class Trajectory { kGrid, kOrbit };

// City-like test scene: a thin ground layer plus Gaussian clusters whose
// masses follow stratified log-normal quantiles, exp(skew * z_k).
struct SyntheticSceneConfig {
  int gaussian_count = 20000;
  int cluster_count = 4;
  double cluster_skew = 1.0;
  double background_fraction = 0.3;
  double extent = 1.0;           // ground domain is [-extent, extent]^2, z up
  double cluster_radius = 0.15;  // 2-sigma radius of a cluster, in extents
  double cluster_height = 0.15;  // tallest structure, in extents
  double gaussian_scale = 0.01;  // typical std-dev, in extents
  int camera_count = 64;
  Trajectory trajectory = Trajectory::kGrid;
  double camera_height = 1.0;    // in extents
  double footprint = 0.75;       // ground half-footprint / camera spacing (grid)
  int image_width = 160;
  int image_height = 120;

  // Throws kInvalidConfig.
  void validate() const;
};

SyntheticSceneConfig synthetic_config_from_json(const std::string& text);
std::string synthetic_config_to_json(const SyntheticSceneConfig& cfg);

struct SyntheticScene {
  std::vector<Gaussian3D> gaussians;
  std::vector<CameraView> cameras;
  std::vector<Eigen::Vector2d> cluster_centers;
  std::vector<double> cluster_weights;  // normalized to sum 1
  std::vector<int> cluster_counts;
  int background_count = 0;

  // Gaussians in a frame with world X/Y as ground axes.
  GaussianScene scene() const;
};

// Deterministic for a fixed (cfg, seed). Throws kInvalidConfig on zero
// counts or when some camera would see no Gaussian.
SyntheticScene generate_synthetic_scene(const SyntheticSceneConfig& cfg, std::uint64_t seed);

}  // namespace gspart
