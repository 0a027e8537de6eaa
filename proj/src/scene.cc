#include "gspart/scene.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "gspart/error.h"

namespace gspart {

Eigen::Matrix3d Gaussian3D::covariance() const {
  const Eigen::Matrix3d r = rotation.normalized().toRotationMatrix();
  const Eigen::Matrix3d s = scale.asDiagonal();
  const Eigen::Matrix3d m = r * s;
  return m * m.transpose();
}

void Gaussian3D::validate() const {
  if (!position.allFinite()) {
    throw Error(ErrorCode::kInvalidInput, "gaussian position is not finite");
  }
  if (!scale.allFinite() || scale.minCoeff() <= 0.0) {
    throw Error(ErrorCode::kInvalidInput, "gaussian scale must be positive and finite");
  }
  if (std::abs(rotation.norm() - 1.0) > 1e-6) {
    throw Error(ErrorCode::kInvalidInput, "gaussian rotation is not a unit quaternion");
  }
  if (!(opacity >= 0.0 && opacity <= 1.0)) {
    throw Error(ErrorCode::kInvalidInput, "gaussian opacity outside [0,1]");
  }
}

bool Gaussian3D::operator==(const Gaussian3D& other) const {
  return position == other.position && scale == other.scale &&
         rotation.coeffs() == other.rotation.coeffs() && opacity == other.opacity;
}

Eigen::Vector3d contract_point(const Eigen::Vector3d& normalized) {
  if (!normalized.allFinite()) {
    throw Error(ErrorCode::kInvalidInput, "contract_point: non-finite input");
  }
  const double r = normalized.norm();
  if (r <= 1.0) return normalized;
  return (2.0 - 1.0 / r) * (normalized / r);
}

Eigen::Vector2d SceneFrame::ground(const Eigen::Vector3d& world) const {
  const Eigen::Vector3d c = contract(world);
  return {c.dot(axis_u), c.dot(axis_v)};
}

Eigen::Vector2d SceneFrame::to_grid(const Eigen::Vector3d& world) const {
  const Eigen::Vector2d g = ground(world);
  return {(g.x() - lo.x()) / (hi.x() - lo.x()), (g.y() - lo.y()) / (hi.y() - lo.y())};
}

Eigen::Vector2d SceneFrame::to_grid_clamped(const Eigen::Vector3d& world) const {
  return to_grid(world).cwiseMax(0.0).cwiseMin(1.0);
}

namespace {

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  const auto n = values.size();
  auto k = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k),
                   values.end());
  return values[k];
}

double median(std::vector<double> values) {
  const auto n = values.size();
  std::sort(values.begin(), values.end());
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

Eigen::Vector3d canonical_sign(Eigen::Vector3d axis) {
  Eigen::Index k = 0;
  axis.cwiseAbs().maxCoeff(&k);
  return axis[k] < 0.0 ? Eigen::Vector3d(-axis) : axis;
}

void fixed_axes(GroundAxes axes, SceneFrame& frame) {
  switch (axes) {
    case GroundAxes::kXZ:
      frame.axis_u = Eigen::Vector3d::UnitX();
      frame.axis_v = Eigen::Vector3d::UnitZ();
      break;
    case GroundAxes::kYZ:
      frame.axis_u = Eigen::Vector3d::UnitY();
      frame.axis_v = Eigen::Vector3d::UnitZ();
      break;
    default:
      frame.axis_u = Eigen::Vector3d::UnitX();
      frame.axis_v = Eigen::Vector3d::UnitY();
      break;
  }
}

}  // namespace

SceneFrame estimate_frame(std::span<const CameraView> cameras,
                          std::span<const Gaussian3D> gaussians,
                          const FrameOptions& options) {
  std::vector<Eigen::Vector3d> anchors;
  if (!cameras.empty()) {
    for (const auto& cam : cameras) anchors.push_back(cam.center());
  } else {
    for (const auto& g : gaussians) anchors.push_back(g.position);
  }
  if (anchors.empty()) {
    throw Error(ErrorCode::kDegenerateScene, "no cameras or gaussians to build a frame");
  }

  SceneFrame frame;
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> coords;
    coords.reserve(anchors.size());
    for (const auto& a : anchors) coords.push_back(a[axis]);
    frame.center[axis] = median(std::move(coords));
  }

  auto distances_from = [&](auto&& points) {
    std::vector<double> d;
    for (const auto& p : points) d.push_back((p - frame.center).norm());
    return d;
  };
  frame.radius = percentile(distances_from(anchors), options.radius_percentile);
  if (!(frame.radius > 1e-12)) {
    std::vector<Eigen::Vector3d> pts;
    for (const auto& g : gaussians) pts.push_back(g.position);
    frame.radius = percentile(distances_from(pts), options.radius_percentile);
  }
  if (!(frame.radius > 1e-12)) frame.radius = 1.0;

  if (options.axes != GroundAxes::kPrincipal) {
    fixed_axes(options.axes, frame);
    return frame;
  }

  fixed_axes(GroundAxes::kXY, frame);
  if (anchors.size() < 3) return frame;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& a : anchors) mean += a;
  mean /= static_cast<double>(anchors.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& a : anchors) cov += (a - mean) * (a - mean).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  const Eigen::Vector3d lambda = solver.eigenvalues();  // ascending
  if (!(lambda[2] > 0.0) || lambda[1] < 1e-12 * lambda[2]) return frame;
  frame.axis_u = canonical_sign(solver.eigenvectors().col(2));
  Eigen::Vector3d v = solver.eigenvectors().col(1);
  v -= v.dot(frame.axis_u) * frame.axis_u;
  frame.axis_v = canonical_sign(v.normalized());
  return frame;
}

SceneFrame fit_grid_bounds(std::span<const Gaussian3D> gaussians, SceneFrame frame) {
  if (gaussians.empty()) {
    throw Error(ErrorCode::kDegenerateScene, "cannot fit grid bounds on an empty scene");
  }
  Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
  Eigen::Vector2d hi = -lo;
  for (const auto& g : gaussians) {
    const Eigen::Vector2d p = frame.ground(g.position);
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  if (!(hi.x() > lo.x()) || !(hi.y() > lo.y())) {
    throw Error(ErrorCode::kDegenerateScene,
                "contracted ground coordinates have zero extent on an axis");
  }
  frame.lo = lo;
  frame.hi = hi;
  return frame;
}

std::vector<Eigen::Vector2d> to_grid_coords(std::span<const Gaussian3D> gaussians,
                                            const SceneFrame& frame) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(gaussians.size());
  for (const auto& g : gaussians) out.push_back(frame.to_grid_clamped(g.position));
  return out;
}

GaussianScene::GaussianScene(std::vector<Gaussian3D> gaussians, const SceneFrame& frame)
    : gaussians_(std::move(gaussians)), frame_(frame) {
  contracted_xy_ = to_grid_coords(gaussians_, frame_);
}

GaussianScene GaussianScene::fit(std::vector<Gaussian3D> gaussians, const SceneFrame& frame) {
  SceneFrame fitted = fit_grid_bounds(gaussians, frame);
  return GaussianScene(std::move(gaussians), fitted);
}

GaussianScene make_scene(std::vector<Gaussian3D> gaussians,
                         std::span<const CameraView> cameras, const FrameOptions& options) {
  const SceneFrame frame = estimate_frame(cameras, gaussians, options);
  return GaussianScene::fit(std::move(gaussians), frame);
}

}  // namespace gspart
