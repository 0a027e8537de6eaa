#include "gspart/camera.h"

#include <cmath>

#include <Eigen/Geometry>

#include "gspart/error.h"

namespace gspart {

CameraView CameraView::scaled(int downscale) const {
  if (downscale < 1) {
    throw Error(ErrorCode::kInvalidInput, "downscale must be >= 1");
  }
  if (downscale == 1) return *this;
  CameraView out = *this;
  const double s = static_cast<double>(downscale);
  out.fx = fx / s;
  out.fy = fy / s;
  out.cx = cx / s;
  out.cy = cy / s;
  out.width = (width + downscale - 1) / downscale;
  out.height = (height + downscale - 1) / downscale;
  return out;
}

void CameraView::validate() const {
  const std::string who = "camera " + std::to_string(id) + ": ";
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    throw Error(ErrorCode::kInvalidInput, who + "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidInput, who + "image size must be positive");
  }
  if (!(z_near > 0.0) || !(z_near < z_far)) {
    throw Error(ErrorCode::kInvalidInput, who + "require 0 < z_near < z_far");
  }
  const Eigen::Matrix3d gram = rotation.transpose() * rotation;
  if (!rotation.allFinite() ||
      (gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > 1e-5) {
    throw Error(ErrorCode::kInvalidInput, who + "rotation is not orthonormal");
  }
  if (!translation.allFinite()) {
    throw Error(ErrorCode::kInvalidInput, who + "translation is not finite");
  }
}

std::optional<Projection> project_point(const CameraView& cam, const Eigen::Vector3d& world) {
  const Eigen::Vector3d p = cam.to_camera(world);
  if (!(p.z() > cam.z_near)) return std::nullopt;
  Projection out;
  out.pixel = {cam.fx * p.x() / p.z() + cam.cx, cam.fy * p.y() / p.z() + cam.cy};
  out.depth = p.z();
  return out;
}

Eigen::Vector3d unproject_pixel(const CameraView& cam, const Eigen::Vector2d& pixel,
                                double depth) {
  const Eigen::Vector3d p_cam((pixel.x() - cam.cx) / cam.fx * depth,
                              (pixel.y() - cam.cy) / cam.fy * depth, depth);
  return cam.rotation.transpose() * (p_cam - cam.translation);
}

CameraView look_at(int id, const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                   const Eigen::Vector3d& up, double focal, int width, int height) {
  const Eigen::Vector3d forward = (target - eye).normalized();
  Eigen::Vector3d right = forward.cross(up);
  if (right.norm() < 1e-9) {
    // Looking along `up`: pick any perpendicular.
    right = forward.unitOrthogonal();
  }
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);
  CameraView cam;
  cam.id = id;
  cam.fx = cam.fy = focal;
  cam.width = width;
  cam.height = height;
  cam.cx = 0.5 * (width - 1);
  cam.cy = 0.5 * (height - 1);
  cam.rotation.row(0) = right.transpose();
  cam.rotation.row(1) = down.transpose();
  cam.rotation.row(2) = forward.transpose();
  cam.translation = -cam.rotation * eye;
  return cam;
}

}  // namespace gspart
