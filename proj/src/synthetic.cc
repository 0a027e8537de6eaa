#include "gspart/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include "gspart/error.h"

namespace gspart {

void SyntheticSceneConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (gaussian_count <= 0) fail("gaussian_count must be positive");
  if (cluster_count < 0) fail("cluster_count must be non-negative");
  if (camera_count <= 0) fail("camera_count must be positive");
  if (cluster_count == 0 && background_fraction <= 0.0) fail("scene has no gaussian source");
  if (!(background_fraction >= 0.0 && background_fraction <= 1.0)) {
    fail("background_fraction must lie in [0,1]");
  }
  if (!(cluster_skew >= 0.0)) fail("cluster_skew must be non-negative");
  if (!(extent > 0.0) || !(camera_height > 0.0) || !(gaussian_scale > 0.0) ||
      !(footprint > 0.0) || !(cluster_radius > 0.0) || !(cluster_height >= 0.0)) {
    fail("geometric parameters must be positive");
  }
  if (cluster_height >= camera_height) fail("cluster_height must be below camera_height");
  if (image_width <= 0 || image_height <= 0) fail("image size must be positive");
}

SyntheticSceneConfig synthetic_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("scene config: ") + e.what());
  }
  SyntheticSceneConfig c;
  try {
    c.gaussian_count = j.value("gaussian_count", c.gaussian_count);
    c.cluster_count = j.value("cluster_count", c.cluster_count);
    c.cluster_skew = j.value("cluster_skew", c.cluster_skew);
    c.background_fraction = j.value("background_fraction", c.background_fraction);
    c.extent = j.value("extent", c.extent);
    c.cluster_radius = j.value("cluster_radius", c.cluster_radius);
    c.cluster_height = j.value("cluster_height", c.cluster_height);
    c.gaussian_scale = j.value("gaussian_scale", c.gaussian_scale);
    c.camera_count = j.value("camera_count", c.camera_count);
    c.camera_height = j.value("camera_height", c.camera_height);
    c.footprint = j.value("footprint", c.footprint);
    c.image_width = j.value("image_width", c.image_width);
    c.image_height = j.value("image_height", c.image_height);
    const std::string traj = j.value("trajectory", std::string("grid"));
    if (traj == "grid") {
      c.trajectory = Trajectory::kGrid;
    } else if (traj == "orbit") {
      c.trajectory = Trajectory::kOrbit;
    } else {
      throw Error(ErrorCode::kInvalidConfig, "unknown trajectory '" + traj + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("scene config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string synthetic_config_to_json(const SyntheticSceneConfig& c) {
  nlohmann::ordered_json j;
  j["gaussian_count"] = c.gaussian_count;
  j["cluster_count"] = c.cluster_count;
  j["cluster_skew"] = c.cluster_skew;
  j["background_fraction"] = c.background_fraction;
  j["extent"] = c.extent;
  j["cluster_radius"] = c.cluster_radius;
  j["cluster_height"] = c.cluster_height;
  j["gaussian_scale"] = c.gaussian_scale;
  j["camera_count"] = c.camera_count;
  j["trajectory"] = c.trajectory == Trajectory::kGrid ? "grid" : "orbit";
  j["camera_height"] = c.camera_height;
  j["footprint"] = c.footprint;
  j["image_width"] = c.image_width;
  j["image_height"] = c.image_height;
  return j.dump(2);
}

GaussianScene SyntheticScene::scene() const {
  FrameOptions options;
  options.axes = GroundAxes::kXY;
  return make_scene(gaussians, cameras, options);
}

namespace {

Gaussian3D random_primitive(const Eigen::Vector3d& position, double base_scale,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Gaussian3D g;
  g.position = position;
  for (int a = 0; a < 3; ++a) {
    // log-uniform in [0.3, 1] * base
    g.scale[a] = base_scale * std::exp(std::log(0.3) * unit(rng));
  }
  Eigen::Vector4d q(normal(rng), normal(rng), normal(rng), normal(rng));
  if (q.norm() < 1e-12) q = Eigen::Vector4d(1, 0, 0, 0);
  q.normalize();
  g.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
  g.opacity = 0.2 + 0.8 * unit(rng);
  return g;
}

std::vector<CameraView> grid_cameras(const SyntheticSceneConfig& c) {
  const int rows = std::max(1, static_cast<int>(std::lround(std::sqrt(c.camera_count))));
  const int cols = (c.camera_count + rows - 1) / rows;
  const double e = c.extent;
  const double sx = 2.0 * e / cols;
  const double sy = 2.0 * e / rows;
  const double height = c.camera_height * e;
  const double half_footprint = c.footprint * std::max(sx, sy);
  const double focal =
      0.5 * std::min(c.image_width, c.image_height) * height / half_footprint;
  std::vector<CameraView> cams;
  for (int k = 0; k < c.camera_count; ++k) {
    const int r = k / cols;
    const int col = k % cols;
    const Eigen::Vector3d eye(-e + sx * (col + 0.5), -e + sy * (r + 0.5), height);
    cams.push_back(look_at(k + 1, eye, eye - Eigen::Vector3d(0, 0, height),
                           Eigen::Vector3d::UnitY(), focal, c.image_width, c.image_height));
  }
  return cams;
}

std::vector<CameraView> orbit_cameras(const SyntheticSceneConfig& c) {
  const double e = c.extent;
  const double radius = 1.5 * e;
  const double height = c.camera_height * e;
  // Wide enough to frame the whole domain from the orbit.
  const double distance = std::hypot(radius, height);
  const double focal = 0.5 * std::min(c.image_width, c.image_height) * distance / (1.6 * e);
  std::vector<CameraView> cams;
  for (int k = 0; k < c.camera_count; ++k) {
    const double theta = 2.0 * M_PI * k / c.camera_count;
    const Eigen::Vector3d eye(radius * std::cos(theta), radius * std::sin(theta), height);
    cams.push_back(look_at(k + 1, eye, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitZ(),
                           focal, c.image_width, c.image_height));
  }
  return cams;
}

bool sees_any(const CameraView& cam, const std::vector<Gaussian3D>& gaussians) {
  for (const auto& g : gaussians) {
    const auto p = project_point(cam, g.position);
    if (p && p->depth < cam.z_far && p->pixel.x() >= 0 && p->pixel.x() <= cam.width &&
        p->pixel.y() >= 0 && p->pixel.y() <= cam.height) {
      return true;
    }
  }
  return false;
}

}  // namespace

SyntheticScene generate_synthetic_scene(const SyntheticSceneConfig& c, std::uint64_t seed) {
  c.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double e = c.extent;

  SyntheticScene out;
  const int clusters = c.cluster_count;
  out.background_count =
      clusters == 0 ? c.gaussian_count
                    : static_cast<int>(std::lround(c.background_fraction * c.gaussian_count));
  const int clustered = c.gaussian_count - out.background_count;

  // Stratified log-normal masses, shuffled over clusters.
  if (clusters > 0) {
    const boost::math::normal_distribution<double> std_normal;
    std::vector<double> w;
    for (int k = 0; k < clusters; ++k) {
      const double z = boost::math::quantile(std_normal, (k + 0.5) / clusters);
      w.push_back(std::exp(c.cluster_skew * z));
    }
    std::shuffle(w.begin(), w.end(), rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    out.cluster_weights = w;
    for (int k = 0; k < clusters; ++k) {
      out.cluster_centers.emplace_back(e * (1.5 * unit(rng) - 0.75),
                                       e * (1.5 * unit(rng) - 0.75));
    }
    out.cluster_counts.assign(static_cast<std::size_t>(clusters), 0);
  }

  const double base_scale = c.gaussian_scale * e;
  out.gaussians.reserve(static_cast<std::size_t>(c.gaussian_count));
  for (int k = 0; k < out.background_count; ++k) {
    const Eigen::Vector3d p(e * (2.0 * unit(rng) - 1.0), e * (2.0 * unit(rng) - 1.0),
                            0.005 * e * normal(rng));
    out.gaussians.push_back(random_primitive(p, base_scale, rng));
  }
  if (clusters > 0) {
    std::discrete_distribution<int> pick(out.cluster_weights.begin(), out.cluster_weights.end());
    const double sigma = 0.5 * c.cluster_radius * e;
    for (int k = 0; k < clustered; ++k) {
      const int cl = pick(rng);
      ++out.cluster_counts[static_cast<std::size_t>(cl)];
      const Eigen::Vector2d& ctr = out.cluster_centers[static_cast<std::size_t>(cl)];
      const double x = std::clamp(ctr.x() + sigma * normal(rng), -e, e);
      const double y = std::clamp(ctr.y() + sigma * normal(rng), -e, e);
      const double z = c.cluster_height * e * unit(rng);
      out.gaussians.push_back(random_primitive({x, y, z}, base_scale, rng));
    }
  }

  out.cameras = c.trajectory == Trajectory::kGrid ? grid_cameras(c) : orbit_cameras(c);
  for (const auto& cam : out.cameras) {
    if (!sees_any(cam, out.gaussians)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "camera " + std::to_string(cam.id) + " sees no gaussian; raise gaussian_count");
    }
  }
  return out;
}

}  // namespace gspart
