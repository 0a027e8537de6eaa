#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "gspart/grid.h"
#include "gspart/synthetic.h"

namespace gspart::testing {

// Small synthetic scene that keeps unit tests fast.
inline SyntheticSceneConfig small_config(int gaussians = 1500, int cameras = 16) {
  SyntheticSceneConfig cfg;
  cfg.gaussian_count = gaussians;
  cfg.camera_count = cameras;
  cfg.cluster_count = 3;
  cfg.cluster_skew = 1.0;
  cfg.image_width = 64;
  cfg.image_height = 48;
  return cfg;
}

// Random strictly increasing cuts with a margin from 0, 1 and each other.
inline GridCuts random_cuts(int m, int n, std::mt19937_64& rng) {
  auto draw = [&](int parts) {
    std::vector<double> c;
    double prev = 0.0;
    for (int i = 1; i < parts; ++i) {
      const double lo = prev + 0.05;
      const double hi = static_cast<double>(i) / parts + 0.5 / parts;
      std::uniform_real_distribution<double> u(lo, std::max(lo + 1e-3, hi - 0.05));
      prev = u(rng);
      c.push_back(prev);
    }
    return c;
  };
  GridCuts cuts;
  cuts.m = m;
  cuts.n = n;
  cuts.v = draw(m);
  cuts.h = draw(n);
  return cuts;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("gspart_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace gspart::testing
