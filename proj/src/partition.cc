#include "gspart/partition.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "gspart/error.h"

namespace gspart {

GridCuts init_uniform_cuts(int m, int n) {
  if (m < 1 || n < 1) throw Error(ErrorCode::kInvalidInput, "grid must be at least 1x1");
  GridCuts cuts;
  cuts.m = m;
  cuts.n = n;
  for (int i = 1; i < m; ++i) cuts.v.push_back(static_cast<double>(i) / m);
  for (int j = 1; j < n; ++j) cuts.h.push_back(static_cast<double>(j) / n);
  return cuts;
}

PartitionProblem::PartitionProblem(const GaussianScene& scene,
                                   std::span<const CameraView> cameras,
                                   const CameraSelectOptions& options)
    : scene_(&scene), cameras_(cameras), options_(options) {
  if (scene.empty()) throw Error(ErrorCode::kInvalidInput, "scene is empty");
  matrix_ = visibility_matrix(scene.gaussians(), cameras);
  clouds_ = compute_clouds(scene, cameras, options);
}

ObjectiveResult evaluate_objective(const PartitionProblem& problem, const GridCuts& cuts,
                                   const Eigen::Vector2d& delta, double tau) {
  cuts.validate();
  ObjectiveResult r;
  r.assignment = assign_cameras(problem.clouds(), cuts, delta, tau);
  r.stats = block_stats(problem.scene(), problem.matrix(), cuts, r.assignment);
  for (const auto& s : r.stats) r.value = std::max(r.value, s.g_vis);
  return r;
}

namespace {

using CacheKey = std::vector<long long>;

CacheKey quantize(const std::vector<double>& x) {
  CacheKey key;
  for (const double v : x) key.push_back(std::llround(v * 1e6));
  return key;
}

}  // namespace

PartitionResult optimize_partition(const PartitionProblem& problem,
                                   const PartitionOptions& options) {
  if (options.iterations < 1) throw Error(ErrorCode::kInvalidInput, "iterations must be >= 1");
  const int m = options.m;
  const int n = options.n;
  const CutBounds bounds = CutBounds::around_uniform(m, n);
  PartitionResult result;
  result.delta = default_delta(m, n, options.delta_scale);
  BOState& state = result.state;
  state.seed = options.seed;

  std::map<CacheKey, std::size_t> cache;  // key -> evaluation index
  std::vector<std::vector<double>> gp_x;  // unique points, unit coordinates
  std::vector<double> gp_y;
  ObjectiveResult best_eval;

  auto record = [&](const std::vector<double>& x, std::size_t value,
                    const ObjectiveResult* eval) {
    state.x.push_back(x);
    state.y.push_back(static_cast<double>(value));
    if (state.iteration == 0 || static_cast<double>(value) < state.best_y) {
      state.best_y = static_cast<double>(value);
      state.best_x = x;
      if (eval) best_eval = *eval;
    }
    state.best_history.push_back(state.best_y);
    ++state.iteration;
  };
  auto evaluate = [&](const std::vector<double>& x) {
    const CacheKey key = quantize(x);
    if (const auto it = cache.find(key); it != cache.end()) {
      record(x, static_cast<std::size_t>(state.y[it->second]), nullptr);
      return;
    }
    const ObjectiveResult eval =
        evaluate_objective(problem, GridCuts::unflatten(m, n, x), result.delta, options.tau);
    cache.emplace(key, state.x.size());
    gp_x.push_back(bounds.to_unit(x));
    gp_y.push_back(static_cast<double>(eval.value));
    record(x, eval.value, &eval);
  };
  auto is_cached = [&](const std::vector<double>& x) { return cache.contains(quantize(x)); };

  evaluate(init_uniform_cuts(m, n).flatten());
  result.uniform_value = static_cast<std::size_t>(state.y.front());

  const std::size_t dim = bounds.dim();
  if (dim > 0) {
    std::mt19937_64 rng(options.seed);
    ShiftedHalton warmup(dim, rng);
    for (int k = 0; k < options.initial_samples && state.iteration < options.iterations; ++k) {
      evaluate(bounds.from_unit(warmup.next()));
    }
    GPHyperparameters previous;
    bool have_previous = false;
    while (state.iteration < options.iterations) {
      std::vector<double> x;
      if (gp_x.size() >= 2) {
        GPFitOptions fit;
        if (have_previous) fit.warm_start = &previous;
        const GPSurrogate gp = gp_fit(gp_x, gp_y, fit);
        previous = gp.hyperparameters();
        have_previous = true;
        x = propose_candidate(gp, bounds, state.best_y, rng, options.proposal);
      } else {
        x = bounds.from_unit(warmup.next());
      }
      if (is_cached(x)) x = bounds.from_unit(warmup.next());
      evaluate(x);
    }
  }

  result.cuts = GridCuts::unflatten(m, n, state.best_x);
  result.best = std::move(best_eval);
  return result;
}

PartitionResult evaluate_fixed_cuts(const PartitionProblem& problem, const GridCuts& cuts,
                                    const PartitionOptions& options) {
  PartitionResult result;
  result.delta = default_delta(cuts.m, cuts.n, options.delta_scale);
  result.cuts = cuts;
  result.best = evaluate_objective(problem, cuts, result.delta, options.tau);
  result.state.x.push_back(cuts.flatten());
  result.state.y.push_back(static_cast<double>(result.best.value));
  result.state.best_history = result.state.y;
  result.state.best_x = cuts.flatten();
  result.state.best_y = result.state.y.front();
  result.state.iteration = 1;
  result.state.seed = options.seed;
  return result;
}

PartitionManifest make_manifest(const PartitionProblem& problem, const PartitionResult& result,
                                const PartitionOptions& options, const std::string& scene_path,
                                const std::string& cams_dir) {
  PartitionManifest m;
  m.cuts = result.cuts;
  m.delta = result.delta;
  m.tau = options.tau;
  const auto regions = block_regions(result.cuts, result.delta);
  for (std::size_t b = 0; b < regions.size(); ++b) {
    ManifestBlock blk;
    blk.block_id = regions[b].block_id;
    blk.row = regions[b].row;
    blk.col = regions[b].col;
    blk.lo = regions[b].lo;
    blk.hi = regions[b].hi;
    blk.camera_ids = result.best.assignment[b];
    const BlockLoadStats& s = result.best.stats[b];
    blk.g_blk = s.g_blk;
    blk.g_vis = s.g_vis;
    blk.g_avgvis = s.g_avgvis;
    blk.area = s.area;
    blk.camera_count = s.camera_count;
    m.blocks.push_back(std::move(blk));
  }
  auto& p = m.provenance;
  p.seed = options.seed;
  p.iterations = std::max(options.iterations, result.state.iteration);
  p.objective_history = result.state.y;
  p.delta_scale = options.delta_scale;
  p.depth_downscale = problem.camera_options().depth_downscale;
  p.stride = problem.camera_options().stride;
  p.weight_floor = problem.camera_options().weight_floor;
  p.scene_path = scene_path;
  p.cams_dir = cams_dir;
  p.frame = problem.scene().frame();
  for (const auto& c : problem.clouds()) p.cloud_points.push_back({c.camera_id, c.size()});
  return m;
}

}  // namespace gspart
