#include "commands.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "gspart/analysis.h"
#include "gspart/block_pipeline.h"
#include "gspart/colmap_io.h"
#include "gspart/depth_render.h"
#include "gspart/error.h"
#include "gspart/manifest.h"
#include "gspart/partition.h"
#include "gspart/ply_io.h"
#include "gspart/report.h"
#include "gspart/synthetic.h"

namespace gspart::cli {

namespace {

namespace fs = std::filesystem;

// Exit codes: 1 = error, 2 = integrity/verification failure.
constexpr int kExitError = 1;
constexpr int kExitIntegrity = 2;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
}

std::pair<int, int> parse_grid(const std::string& text) {
  int m = 0, n = 0;
  char x = 0, tail = 0;
  if (std::sscanf(text.c_str(), "%d%c%d%c", &m, &x, &n, &tail) != 3 || (x != 'x' && x != 'X') ||
      m < 1 || n < 1) {
    throw Error(ErrorCode::kInvalidInput, "grid must look like MxN, got '" + text + "'");
  }
  return {m, n};
}

GroundAxes parse_axes(const std::string& text) {
  if (text == "principal") return GroundAxes::kPrincipal;
  if (text == "xy") return GroundAxes::kXY;
  if (text == "xz") return GroundAxes::kXZ;
  if (text == "yz") return GroundAxes::kYZ;
  throw Error(ErrorCode::kInvalidInput, "ground axes must be principal|xy|xz|yz");
}

struct SceneArgs {
  std::string scene;
  std::string cams;
  std::string axes = "principal";
};

struct ProblemArgs {
  double tau = 0.15;
  int depth_downscale = 4;
  int stride = 2;
  double weight_floor = 0.1;

  CameraSelectOptions options() const {
    CameraSelectOptions o;
    o.tau = tau;
    o.depth_downscale = depth_downscale;
    o.stride = stride;
    o.weight_floor = weight_floor;
    return o;
  }
};

void add_problem_flags(CLI::App* cmd, ProblemArgs& a) {
  cmd->add_option("--tau", a.tau, "camera assignment threshold")->capture_default_str();
  cmd->add_option("--depth-downscale", a.depth_downscale, "depth render downscale")
      ->capture_default_str();
  cmd->add_option("--stride", a.stride, "back-projection pixel stride")->capture_default_str();
  cmd->add_option("--weight-floor", a.weight_floor, "minimum accumulated weight per pixel")
      ->capture_default_str();
}

RuntimeModel load_model_arg(const std::string& arg) {
  return runtime_model_from_json(read_text(arg));
}

// ---- subcommands ---------------------------------------------------------

int gen_scene(const std::string& config, std::uint64_t seed, const std::string& out_scene,
              const std::string& out_cams) {
  const SyntheticSceneConfig cfg =
      config.empty() ? SyntheticSceneConfig{} : synthetic_config_from_json(read_text(config));
  const SyntheticScene s = generate_synthetic_scene(cfg, seed);
  save_splat_ply(s.gaussians, out_scene);
  write_colmap_cameras(s.cameras, out_cams);
  std::cout << "wrote " << s.gaussians.size() << " gaussians, " << s.cameras.size()
            << " cameras\n";
  return 0;
}

int partition(const SceneArgs& sa, const ProblemArgs& pa, const std::string& grid, int iters,
              double delta_scale, std::uint64_t seed, const std::string& out) {
  const auto [m, n] = parse_grid(grid);
  const auto cams = load_colmap_cameras(sa.cams);
  FrameOptions fo;
  fo.axes = parse_axes(sa.axes);
  const GaussianScene scene = make_scene(load_splat_ply(sa.scene), cams, fo);
  reset_render_count();
  const PartitionProblem problem(scene, cams, pa.options());
  PartitionOptions opt;
  opt.m = m;
  opt.n = n;
  opt.iterations = iters;
  opt.delta_scale = delta_scale;
  opt.tau = pa.tau;
  opt.seed = seed;
  const PartitionResult result = optimize_partition(problem, opt);
  write_manifest(make_manifest(problem, result, opt, sa.scene, sa.cams), out);
  std::cout << "max G_vis: uniform " << result.uniform_value << ", optimized "
            << result.best.value << " (" << result.state.iteration << " evaluations, "
            << render_count() << " depth renders)\n";
  return 0;
}

int assign(const SceneArgs& sa, const std::string& manifest_path) {
  const PartitionManifest man = load_manifest(manifest_path);
  const auto cams = load_colmap_cameras(sa.cams);
  const GaussianScene scene(load_splat_ply(sa.scene), man.provenance.frame);
  CameraSelectOptions co;
  co.tau = man.tau;
  co.depth_downscale = man.provenance.depth_downscale;
  co.stride = man.provenance.stride;
  co.weight_floor = man.provenance.weight_floor;
  const PartitionProblem problem(scene, cams, co);
  const ObjectiveResult obj = evaluate_objective(problem, man.cuts, man.delta, man.tau);
  int mismatches = 0;
  for (std::size_t b = 0; b < man.blocks.size(); ++b) {
    const ManifestBlock& blk = man.blocks[b];
    const BlockLoadStats& s = obj.stats[b];
    const bool ok = blk.camera_ids == obj.assignment[b] && blk.g_vis == s.g_vis &&
                    blk.g_blk == s.g_blk && blk.camera_count == s.camera_count;
    if (!ok) {
      ++mismatches;
      std::cerr << "block " << blk.block_id << ": manifest has " << blk.camera_ids.size()
                << " cameras / G_vis " << blk.g_vis << ", recomputed " << obj.assignment[b].size()
                << " / " << s.g_vis << "\n";
    }
  }
  std::cout << (mismatches == 0 ? "assignment verified" : "assignment MISMATCH") << " ("
            << man.blocks.size() << " blocks)\n";
  return mismatches == 0 ? 0 : kExitIntegrity;
}

int crop(const std::string& scene_path, std::string cams_dir, const std::string& manifest_path,
         int block, const std::string& out) {
  const PartitionManifest man = load_manifest(manifest_path);
  if (cams_dir.empty()) cams_dir = man.provenance.cams_dir;
  if (block < 1 || block > static_cast<int>(man.blocks.size())) {
    throw Error(ErrorCode::kInvalidIndex, "block " + std::to_string(block) + " is out of range");
  }
  const auto cams = load_colmap_cameras(cams_dir);
  const GaussianScene scene(load_splat_ply(scene_path), man.provenance.frame);
  const ManifestBlock& blk = man.blocks[static_cast<std::size_t>(block - 1)];
  std::vector<CameraView> used;
  for (const auto& c : cams) {
    if (std::binary_search(blk.camera_ids.begin(), blk.camera_ids.end(), c.id)) used.push_back(c);
  }
  if (used.size() != blk.camera_ids.size()) {
    throw Error(ErrorCode::kConsistency, "manifest references cameras missing from " + cams_dir);
  }
  const VisibilityMatrix matrix = used.empty()
                                      ? VisibilityMatrix({}, {}, scene.size())
                                      : visibility_matrix(scene.gaussians(), used);
  const BlockRegion cell = block_region(man.cuts, blk.row, blk.col, Eigen::Vector2d::Zero());
  const BlockSubScene sub = visibility_crop(scene, matrix, blk.camera_ids, cell);
  save_block(sub, out);
  const auto in = std::count(sub.in_block.begin(), sub.in_block.end(), true);
  std::cout << "block " << block << ": " << sub.size() << " gaussians (" << in
            << " in block)\n";
  return 0;
}

int densify_sim(const std::string& in, int steps, std::uint64_t seed, const DensifyConfig& cfg,
                const std::string& out) {
  BlockSubScene sub = load_block(in);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> grad(0.0, 1.0);
  bool ok = true;
  for (int s = 0; s < steps; ++s) {
    std::vector<double> g(sub.size());
    for (auto& v : g) v = grad(rng);
    DensifyStats stats;
    BlockSubScene next = simulate_densify_step(sub, g, cfg, rng, &stats);
    for (const auto& [child, parent] : stats.created_from) {
      if (!sub.in_block[parent]) ok = false;
    }
    std::cout << "step " << s + 1 << ": " << stats.cloned << " cloned, " << stats.split
              << " split, " << next.size() << " gaussians\n";
    sub = std::move(next);
  }
  save_block(sub, out);
  if (!ok) std::cerr << "densification touched an out-of-block primitive\n";
  return ok ? 0 : kExitIntegrity;
}

int merge(const std::string& manifest_path, const std::string& blocks_dir, const std::string& out) {
  const PartitionManifest man = load_manifest(manifest_path);
  std::vector<BlockSubScene> subs;
  for (const auto& blk : man.blocks) {
    const fs::path p = fs::path(blocks_dir) / ("block_" + std::to_string(blk.block_id) + ".ply");
    const BlockSubScene sub = load_block(p);
    if (sub.block_id != blk.block_id) {
      throw Error(ErrorCode::kConsistency, p.string() + " holds block " +
                                               std::to_string(sub.block_id));
    }
    const BlockRegion cell = block_region(man.cuts, blk.row, blk.col, Eigen::Vector2d::Zero());
    subs.push_back(prune_outside(sub, cell));
  }
  try {
    const auto merged = merge_blocks(subs);
    save_splat_ply(merged, out);
    std::cout << "merged " << merged.size() << " gaussians from " << subs.size() << " blocks\n";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMergeIntegrity) throw;
    std::cerr << e.what() << "\n";
    return kExitIntegrity;
  }
  return 0;
}

RuntimeModel fit_from_timings(const PartitionManifest& man, const std::string& timings) {
  // CSV: block_id,t_fine (minutes), header optional.
  std::map<int, double> t;
  std::istringstream in(read_text(timings));
  std::string line;
  while (std::getline(in, line)) {
    int b = 0;
    double v = 0.0;
    if (std::sscanf(line.c_str(), "%d,%lf", &b, &v) == 2) t[b] = v;
  }
  std::vector<double> g, y;
  for (const auto& blk : man.blocks) {
    const auto it = t.find(blk.block_id);
    if (it == t.end()) continue;
    g.push_back(static_cast<double>(blk.g_vis));
    y.push_back(it->second);
  }
  return fit_runtime_model(g, y);
}

int report(const std::string& manifest_path, const std::string& model_arg,
           const std::string& timings, double t_coarse, double t_partition,
           const std::string& format, const std::string& out) {
  const PartitionManifest man = load_manifest(manifest_path);
  RuntimeModel model;
  if (model_arg == "fit") {
    if (timings.empty()) throw Error(ErrorCode::kInvalidInput, "--runtime-model fit needs --timings");
    model = fit_from_timings(man, timings);
  } else {
    model = load_model_arg(model_arg);
  }
  std::vector<BlockLoadStats> stats;
  for (const auto& blk : man.blocks) {
    stats.push_back({blk.block_id, blk.area, blk.camera_count, blk.g_blk, blk.g_vis, blk.g_avgvis});
  }
  const E2EReport r = make_e2e_report(std::move(stats), model, Duration::from_minutes(t_coarse),
                                      Duration::from_minutes(t_partition));
  emit_report(r, out, parse_report_format(format));
  std::cout << "T_E2E " << r.t_e2e.hhmm() << " (model slope " << model.slope << ", r "
            << model.fit_r << ")\n";
  return 0;
}

int compare(const SceneArgs& sa, const ProblemArgs& pa, const std::string& grid,
            const std::string& strategies, int iters, double delta_scale, std::uint64_t seed,
            const std::string& model_arg, const std::string& out) {
  const auto [m, n] = parse_grid(grid);
  std::vector<Strategy> list;
  std::istringstream ss(strategies);
  for (std::string tok; std::getline(ss, tok, ',');) list.push_back(parse_strategy(tok));
  const RuntimeModel model =
      model_arg.empty() ? RuntimeModel{1e-3, 0.0, 0.0} : load_model_arg(model_arg);
  const auto cams = load_colmap_cameras(sa.cams);
  FrameOptions fo;
  fo.axes = parse_axes(sa.axes);
  const GaussianScene scene = make_scene(load_splat_ply(sa.scene), cams, fo);
  const PartitionProblem problem(scene, cams, pa.options());
  PartitionOptions opt;
  opt.m = m;
  opt.n = n;
  opt.iterations = iters;
  opt.delta_scale = delta_scale;
  opt.tau = pa.tau;
  opt.seed = seed;
  const Comparison cmp = compare_partitions(problem, list, model, opt);
  write_text(out, comparison_to_csv(cmp));
  for (std::size_t i = 0; i < cmp.results.size(); ++i) {
    const auto& r = cmp.results[i];
    std::cout << to_string(r.strategy) << ": max G_vis " << r.max_g_vis << ", max t_fine "
              << r.max_t_fine << (i == cmp.winner ? "  <- winner" : "") << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Load-balanced scene partitioning for block-parallel splat training"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress warnings");

  std::string config, out_scene, out_cams, out, manifest, blocks_dir, model_arg, timings,
      format = "json", grid = "2x2", strategies = "uniform,equal-camera,optimized", block_in;
  std::uint64_t seed = 0;
  int iters = 100, block = 1, steps = 1;
  double delta_scale = 0.1, t_coarse = 0.0, t_partition = 0.0;
  SceneArgs sa;
  ProblemArgs pa;
  DensifyConfig dcfg;

  auto* gen = app.add_subcommand("gen-scene", "generate a synthetic scene and cameras");
  gen->add_option("--config", config, "scene config JSON (defaults if omitted)");
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--out-scene", out_scene)->required();
  gen->add_option("--out-cams", out_cams)->required();

  auto* part = app.add_subcommand("partition", "optimize grid cuts and write a manifest");
  part->add_option("--scene", sa.scene)->required();
  part->add_option("--cams", sa.cams)->required();
  part->add_option("--grid", grid, "MxN")->capture_default_str();
  part->add_option("--iters", iters, "objective evaluations (L)")->capture_default_str();
  part->add_option("--delta-scale", delta_scale)->capture_default_str();
  part->add_option("--seed", seed)->capture_default_str();
  part->add_option("--ground-axes", sa.axes, "principal|xy|xz|yz")->capture_default_str();
  part->add_option("--out", out)->required();
  add_problem_flags(part, pa);

  auto* asg = app.add_subcommand("assign", "recompute camera sets and verify a manifest");
  asg->add_option("--scene", sa.scene)->required();
  asg->add_option("--cams", sa.cams)->required();
  asg->add_option("--manifest", manifest)->required();

  auto* crp = app.add_subcommand("crop", "extract one block's visible sub-scene");
  crp->add_option("--scene", sa.scene)->required();
  crp->add_option("--cams", sa.cams, "camera dir (defaults to the manifest's)");
  crp->add_option("--manifest", manifest)->required();
  crp->add_option("--block", block)->required();
  crp->add_option("--out", out, "output PLY; sidecar JSON written next to it")->required();

  auto* den = app.add_subcommand("densify-sim", "run simulated selective densification");
  den->add_option("--block", block_in, "block PLY with sidecar")->required();
  den->add_option("--steps", steps)->capture_default_str();
  den->add_option("--seed", seed)->capture_default_str();
  den->add_option("--grad-threshold", dcfg.grad_threshold)->capture_default_str();
  den->add_option("--split-scale", dcfg.split_scale)->capture_default_str();
  den->add_option("--out", out)->required();

  auto* mrg = app.add_subcommand("merge", "prune blocks to their cells and merge");
  mrg->add_option("--manifest", manifest)->required();
  mrg->add_option("--blocks-dir", blocks_dir, "holds block_<b>.ply + .json")->required();
  mrg->add_option("--out", out)->required();

  auto* rep = app.add_subcommand("report", "predict per-block and end-to-end runtime");
  rep->add_option("--manifest", manifest)->required();
  rep->add_option("--runtime-model", model_arg, "model JSON path or 'fit'")->required();
  rep->add_option("--timings", timings, "CSV block_id,t_fine (minutes) for 'fit'");
  rep->add_option("--t-coarse", t_coarse, "minutes")->capture_default_str();
  rep->add_option("--t-partition", t_partition, "minutes")->capture_default_str();
  rep->add_option("--format", format, "json|csv")->capture_default_str();
  rep->add_option("--out", out)->required();

  auto* cmp = app.add_subcommand("compare", "compare partition strategies");
  cmp->add_option("--scene", sa.scene)->required();
  cmp->add_option("--cams", sa.cams)->required();
  cmp->add_option("--grid", grid, "MxN")->capture_default_str();
  cmp->add_option("--strategies", strategies)->capture_default_str();
  cmp->add_option("--iters", iters)->capture_default_str();
  cmp->add_option("--delta-scale", delta_scale)->capture_default_str();
  cmp->add_option("--seed", seed)->capture_default_str();
  cmp->add_option("--ground-axes", sa.axes)->capture_default_str();
  cmp->add_option("--runtime-model", model_arg, "model JSON (default slope 1e-3 min/Gaussian)");
  cmp->add_option("--out", out)->required();
  add_problem_flags(cmp, pa);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  set_warnings_enabled(!quiet);

  try {
    if (*gen) return gen_scene(config, seed, out_scene, out_cams);
    if (*part) return partition(sa, pa, grid, iters, delta_scale, seed, out);
    if (*asg) return assign(sa, manifest);
    if (*crp) return crop(sa.scene, sa.cams, manifest, block, out);
    if (*den) return densify_sim(block_in, steps, seed, dcfg, out);
    if (*mrg) return merge(manifest, blocks_dir, out);
    if (*rep) return report(manifest, model_arg, timings, t_coarse, t_partition, format, out);
    if (*cmp) {
      return compare(sa, pa, grid, strategies, iters, delta_scale, seed, model_arg, out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace gspart::cli
