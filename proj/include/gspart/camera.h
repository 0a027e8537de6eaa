#pragma once

#include <optional>

#include <Eigen/Core>

namespace gspart {

// Pinhole camera with a world-to-camera rigid transform. Pixel centers sit
// at integer coordinates.
struct CameraView {
  int id = 0;
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double z_near = 0.01;
  double z_far = 1000.0;

  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }
  Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
    return rotation * world + translation;
  }

  // Same view at 1/downscale resolution (intrinsics divided, size rounded up).
  CameraView scaled(int downscale) const;

  // Throws kInvalidInput when intrinsics, clip planes or rotation are invalid.
  void validate() const;
};

struct Projection {
  Eigen::Vector2d pixel;
  double depth = 0.0;
};

// Empty when the point is at or behind the near plane.
std::optional<Projection> project_point(const CameraView& cam, const Eigen::Vector3d& world);

// Inverse of project_point for a camera-frame depth.
Eigen::Vector3d unproject_pixel(const CameraView& cam, const Eigen::Vector2d& pixel,
                                double depth);

// Camera at `eye` looking at `target`; +y of the image points along -up.
CameraView look_at(int id, const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                   const Eigen::Vector3d& up, double focal, int width, int height);

}  // namespace gspart
