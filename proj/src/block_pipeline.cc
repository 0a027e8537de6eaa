#include "gspart/block_pipeline.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "gspart/error.h"
#include "gspart/ply_io.h"

namespace gspart {

void BlockSubScene::validate() const {
  const std::size_t n = gaussians.size();
  if (origin_index.size() != n || in_block.size() != n || densify_eligible.size() != n) {
    throw Error(ErrorCode::kInvalidInput, "block sub-scene arrays have inconsistent lengths");
  }
  std::unordered_set<std::int64_t> seen;
  for (std::size_t i = 0; i < n; ++i) {
    if (densify_eligible[i] && !in_block[i]) {
      throw Error(ErrorCode::kInvalidInput, "densify_eligible set outside the block");
    }
    if (origin_index[i] >= 0 && !seen.insert(origin_index[i]).second) {
      throw Error(ErrorCode::kInvalidInput, "duplicate origin index " + std::to_string(origin_index[i]));
    }
  }
}

BlockSubScene visibility_crop(const GaussianScene& scene, const VisibilityMatrix& matrix,
                              std::span<const int> camera_ids, const BlockRegion& cell) {
  BlockSubScene sub;
  sub.block_id = cell.block_id;
  sub.cell = cell;
  sub.frame = scene.frame();
  if (camera_ids.empty()) {
    warn("block " + std::to_string(cell.block_id) + " has no cameras; cropped sub-scene is empty");
    return sub;
  }
  const IndexSet visible = visible_gaussians_for_block(matrix, camera_ids);
  const IndexSet inside = gaussians_in_block(scene, cell);
  for (auto i = visible.find_first(); i != IndexSet::npos; i = visible.find_next(i)) {
    sub.gaussians.push_back(scene[i]);
    sub.origin_index.push_back(static_cast<std::int64_t>(i));
    sub.in_block.push_back(inside.test(i));
    sub.densify_eligible.push_back(inside.test(i));
  }
  return sub;
}

std::vector<bool> selective_densify_mask(const BlockSubScene& sub) { return sub.in_block; }

BlockSubScene simulate_densify_step(const BlockSubScene& sub, std::span<const double> grad_mag,
                                    const DensifyConfig& config, std::mt19937_64& rng,
                                    DensifyStats* stats) {
  sub.validate();
  if (grad_mag.size() != sub.size()) {
    throw Error(ErrorCode::kInvalidInput, "grad_mag must have one entry per primitive");
  }
  const std::vector<bool> mask = selective_densify_mask(sub);
  std::normal_distribution<double> normal(0.0, 1.0);

  BlockSubScene out;
  out.block_id = sub.block_id;
  out.cell = sub.cell;
  out.frame = sub.frame;
  DensifyStats local;
  auto push = [&](const Gaussian3D& g, std::int64_t origin, bool in_block) {
    out.gaussians.push_back(g);
    out.origin_index.push_back(origin);
    out.in_block.push_back(in_block);
    out.densify_eligible.push_back(in_block);
  };
  auto push_created = [&](const Gaussian3D& g, std::size_t parent) {
    local.created_from.emplace_back(out.size(), parent);
    push(g, -1, out.cell.contains(out.frame.to_grid_clamped(g.position)));
  };

  std::vector<std::pair<Gaussian3D, std::size_t>> clones;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const Gaussian3D& g = sub.gaussians[i];
    if (!mask[i] || !(grad_mag[i] >= config.grad_threshold)) {
      push(g, sub.origin_index[i], sub.in_block[i]);
      out.densify_eligible.back() = sub.densify_eligible[i];
      continue;
    }
    if (g.max_scale() < config.split_scale) {
      push(g, sub.origin_index[i], sub.in_block[i]);
      out.densify_eligible.back() = sub.densify_eligible[i];
      Gaussian3D c = g;
      for (int a = 0; a < 3; ++a) c.position[a] += config.clone_jitter * g.scale[a] * normal(rng);
      clones.emplace_back(c, i);
      ++local.cloned;
    } else {
      const Eigen::Matrix3d rot = g.rotation.toRotationMatrix();
      for (int k = 0; k < config.split_children; ++k) {
        const Eigen::Vector3d offset(normal(rng), normal(rng), normal(rng));
        Gaussian3D c = g;
        c.position = g.position + rot * g.scale.cwiseProduct(offset);
        c.scale = g.scale / config.split_factor;
        push_created(c, i);
      }
      ++local.split;
    }
  }
  for (const auto& [c, parent] : clones) push_created(c, parent);
  if (stats) *stats = std::move(local);
  return out;
}

BlockSubScene prune_outside(const BlockSubScene& sub, const BlockRegion& cell) {
  BlockSubScene out;
  out.block_id = sub.block_id;
  out.cell = cell;
  out.frame = sub.frame;
  for (std::size_t i = 0; i < sub.size(); ++i) {
    if (!cell.contains(sub.frame.to_grid_clamped(sub.gaussians[i].position))) continue;
    out.gaussians.push_back(sub.gaussians[i]);
    out.origin_index.push_back(sub.origin_index[i]);
    out.in_block.push_back(sub.in_block[i]);
    out.densify_eligible.push_back(sub.densify_eligible[i]);
  }
  return out;
}

std::vector<Gaussian3D> merge_blocks(std::span<const BlockSubScene> subs,
                                     std::vector<std::int64_t>* origin_index) {
  std::unordered_set<std::int64_t> seen;
  std::vector<Gaussian3D> merged;
  std::vector<std::int64_t> origins;
  for (const auto& sub : subs) {
    for (std::size_t i = 0; i < sub.size(); ++i) {
      const std::int64_t o = sub.origin_index[i];
      if (o >= 0 && !seen.insert(o).second) {
        throw Error(ErrorCode::kMergeIntegrity,
                    "origin index " + std::to_string(o) + " appears in more than one block (block " +
                        std::to_string(sub.block_id) + "); was the prune region enlarged?");
      }
      merged.push_back(sub.gaussians[i]);
      origins.push_back(o);
    }
  }
  if (origin_index) *origin_index = std::move(origins);
  return merged;
}

std::filesystem::path sidecar_path(const std::filesystem::path& ply_path) {
  std::filesystem::path p = ply_path;
  p.replace_extension(".json");
  return p;
}

namespace {

using Json = nlohmann::ordered_json;

Json flags(const std::vector<bool>& v) {
  Json a = Json::array();
  for (const bool b : v) a.push_back(b);
  return a;
}

}  // namespace

void save_block(const BlockSubScene& sub, const std::filesystem::path& ply_path) {
  sub.validate();
  save_splat_ply(sub.gaussians, ply_path);
  Json j;
  j["block_id"] = sub.block_id;
  j["origin_index"] = sub.origin_index;
  j["in_block"] = flags(sub.in_block);
  j["densify_eligible"] = flags(sub.densify_eligible);
  j["cell"] = {{"row", sub.cell.row},
               {"col", sub.cell.col},
               {"lo", {sub.cell.lo.x(), sub.cell.lo.y()}},
               {"hi", {sub.cell.hi.x(), sub.cell.hi.y()}}};
  const auto& f = sub.frame;
  j["frame"] = {{"center", {f.center.x(), f.center.y(), f.center.z()}},
                {"radius", f.radius},
                {"axis_u", {f.axis_u.x(), f.axis_u.y(), f.axis_u.z()}},
                {"axis_v", {f.axis_v.x(), f.axis_v.y(), f.axis_v.z()}},
                {"lo", {f.lo.x(), f.lo.y()}},
                {"hi", {f.hi.x(), f.hi.y()}}};
  const auto path = sidecar_path(ply_path);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

BlockSubScene load_block(const std::filesystem::path& ply_path) {
  BlockSubScene sub;
  sub.gaussians = load_splat_ply(ply_path);
  const auto path = sidecar_path(ply_path);
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    const Json j = Json::parse(ss.str());
    sub.block_id = j.at("block_id").get<int>();
    sub.origin_index = j.at("origin_index").get<std::vector<std::int64_t>>();
    for (const auto& b : j.at("in_block")) sub.in_block.push_back(b.get<bool>());
    for (const auto& b : j.at("densify_eligible")) sub.densify_eligible.push_back(b.get<bool>());
    const Json& c = j.at("cell");
    sub.cell.block_id = sub.block_id;
    sub.cell.row = c.at("row").get<int>();
    sub.cell.col = c.at("col").get<int>();
    sub.cell.lo = {c.at("lo")[0].get<double>(), c.at("lo")[1].get<double>()};
    sub.cell.hi = {c.at("hi")[0].get<double>(), c.at("hi")[1].get<double>()};
    const Json& f = j.at("frame");
    auto v3 = [](const Json& a) {
      return Eigen::Vector3d(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
    };
    sub.frame.center = v3(f.at("center"));
    sub.frame.radius = f.at("radius").get<double>();
    sub.frame.axis_u = v3(f.at("axis_u"));
    sub.frame.axis_v = v3(f.at("axis_v"));
    sub.frame.lo = {f.at("lo")[0].get<double>(), f.at("lo")[1].get<double>()};
    sub.frame.hi = {f.at("hi")[0].get<double>(), f.at("hi")[1].get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, path.string() + ": " + e.what());
  }
  sub.validate();
  return sub;
}

}  // namespace gspart
