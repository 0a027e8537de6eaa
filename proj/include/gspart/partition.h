#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gspart/bayes_opt.h"
#include "gspart/camera_select.h"
#include "gspart/grid.h"
#include "gspart/manifest.h"
#include "gspart/scene.h"
#include "gspart/visibility.h"

namespace gspart {

// (i/m, j/n) cuts.
GridCuts init_uniform_cuts(int m, int n);

// Everything the objective needs, computed once: the visibility matrix and
// one depth render + back-projection per camera. Holds references to
// scene and cameras, which must outlive it.
class PartitionProblem {
 public:
  PartitionProblem(const GaussianScene& scene, std::span<const CameraView> cameras,
                   const CameraSelectOptions& options = {});

  const GaussianScene& scene() const { return *scene_; }
  std::span<const CameraView> cameras() const { return cameras_; }
  const VisibilityMatrix& matrix() const { return matrix_; }
  const std::vector<BackprojectedCloud>& clouds() const { return clouds_; }
  const CameraSelectOptions& camera_options() const { return options_; }

 private:
  const GaussianScene* scene_;
  std::span<const CameraView> cameras_;
  CameraSelectOptions options_;
  VisibilityMatrix matrix_;
  std::vector<BackprojectedCloud> clouds_;
};

struct ObjectiveResult {
  std::size_t value = 0;  // max_b G_vis
  std::vector<BlockLoadStats> stats;
  CameraAssignment assignment;
};

// Assigns cameras to the delta-grown regions and returns the largest
// per-block visible-Gaussian count. Throws kInvalidCuts.
ObjectiveResult evaluate_objective(const PartitionProblem& problem, const GridCuts& cuts,
                                   const Eigen::Vector2d& delta, double tau);

struct PartitionOptions {
  int m = 2;
  int n = 2;
  int iterations = 100;        // L, total objective evaluations
  double delta_scale = 0.1;    // delta = (scale/m, scale/n)
  double tau = 0.15;
  std::uint64_t seed = 0;
  int initial_samples = 8;     // quasi-random points after the uniform cuts
  ProposalOptions proposal;
};

struct BOState {
  std::vector<std::vector<double>> x;  // evaluated cut vectors, in order
  std::vector<double> y;               // objective per evaluation
  std::vector<double> best_history;    // incumbent after each evaluation
  std::vector<double> best_x;
  double best_y = 0.0;
  int iteration = 0;
  std::uint64_t seed = 0;
};

struct PartitionResult {
  GridCuts cuts;
  Eigen::Vector2d delta = Eigen::Vector2d::Zero();
  BOState state;
  ObjectiveResult best;
  std::size_t uniform_value = 0;
};

// Uniform cuts first, then quasi-random warm-up, then GP/EI proposals until
// `iterations` evaluations. Returns the incumbent (first minimum).
PartitionResult optimize_partition(const PartitionProblem& problem,
                                   const PartitionOptions& options);

// Manifest for a result; paths are recorded verbatim in provenance.
PartitionManifest make_manifest(const PartitionProblem& problem, const PartitionResult& result,
                                const PartitionOptions& options, const std::string& scene_path,
                                const std::string& cams_dir);

// Manifest for fixed cuts (e.g. uniform) evaluated once.
PartitionResult evaluate_fixed_cuts(const PartitionProblem& problem, const GridCuts& cuts,
                                    const PartitionOptions& options);

}  // namespace gspart
