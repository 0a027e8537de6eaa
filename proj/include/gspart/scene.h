#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "gspart/camera.h"

namespace gspart {

struct Gaussian3D {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  // Per-axis standard deviations, world units.
  Eigen::Vector3d scale = Eigen::Vector3d::Constant(0.01);
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();
  double opacity = 1.0;

  double max_scale() const { return scale.maxCoeff(); }
  Eigen::Matrix3d covariance() const;
  // Throws kInvalidInput on non-finite values, non-positive scale,
  // non-unit quaternion or opacity outside [0,1].
  void validate() const;

  bool operator==(const Gaussian3D& other) const;
};

// Spherical contraction in a normalized frame: identity inside the unit
// ball, (2 - 1/|x|) x/|x| outside. Throws kInvalidInput on non-finite input.
Eigen::Vector3d contract_point(const Eigen::Vector3d& normalized);

enum class GroundAxes { kPrincipal, kXY, kXZ, kYZ };

struct FrameOptions {
  GroundAxes axes = GroundAxes::kPrincipal;
  double radius_percentile = 0.9;
};

// Maps world points to the [0,1]^2 partition plane:
// normalize -> contract -> project onto ground axes -> rescale by [lo, hi].
struct SceneFrame {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 1.0;
  Eigen::Vector3d axis_u = Eigen::Vector3d::UnitX();
  Eigen::Vector3d axis_v = Eigen::Vector3d::UnitY();
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Ones();

  Eigen::Vector3d normalize(const Eigen::Vector3d& world) const {
    return (world - center) / radius;
  }
  Eigen::Vector3d contract(const Eigen::Vector3d& world) const {
    return contract_point(normalize(world));
  }
  // Contracted ground-plane coordinates before rescaling.
  Eigen::Vector2d ground(const Eigen::Vector3d& world) const;
  // Grid coordinates, unclamped.
  Eigen::Vector2d to_grid(const Eigen::Vector3d& world) const;
  Eigen::Vector2d to_grid_clamped(const Eigen::Vector3d& world) const;

  bool operator==(const SceneFrame& other) const = default;
};

// Center = per-axis median of camera centers, radius = radius_percentile of
// camera-to-center distances, ground axes per options. Falls back to the
// Gaussian centers when there are no cameras. Grid bounds are left unset.
SceneFrame estimate_frame(std::span<const CameraView> cameras,
                          std::span<const Gaussian3D> gaussians,
                          const FrameOptions& options = {});

// Sets frame.lo/hi to the tight bounds of the contracted ground coordinates.
// Throws kDegenerateScene when either axis has zero extent.
SceneFrame fit_grid_bounds(std::span<const Gaussian3D> gaussians, SceneFrame frame);

// Per-Gaussian clamped grid coordinates under a fitted frame.
std::vector<Eigen::Vector2d> to_grid_coords(std::span<const Gaussian3D> gaussians,
                                            const SceneFrame& frame);

class GaussianScene {
 public:
  GaussianScene() = default;
  // Uses frame as given (bounds included) and caches grid coordinates.
  GaussianScene(std::vector<Gaussian3D> gaussians, const SceneFrame& frame);

  // Fits tight grid bounds on the Gaussians, then constructs.
  static GaussianScene fit(std::vector<Gaussian3D> gaussians, const SceneFrame& frame);

  std::size_t size() const { return gaussians_.size(); }
  bool empty() const { return gaussians_.empty(); }
  const std::vector<Gaussian3D>& gaussians() const { return gaussians_; }
  const Gaussian3D& operator[](std::size_t i) const { return gaussians_[i]; }
  const std::vector<Eigen::Vector2d>& contracted_xy() const { return contracted_xy_; }
  const SceneFrame& frame() const { return frame_; }

 private:
  std::vector<Gaussian3D> gaussians_;
  std::vector<Eigen::Vector2d> contracted_xy_;
  SceneFrame frame_;
};

// estimate_frame + GaussianScene::fit.
GaussianScene make_scene(std::vector<Gaussian3D> gaussians,
                         std::span<const CameraView> cameras,
                         const FrameOptions& options = {});

}  // namespace gspart
