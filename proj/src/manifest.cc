#include "gspart/manifest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gspart/error.h"

namespace gspart {

using Json = nlohmann::ordered_json;

namespace {

Json vec2(const Eigen::Vector2d& v) { return Json::array({v.x(), v.y()}); }
Json vec3(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector2d get_vec2(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorCode::kSchema, "expected a 2-vector");
  return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::Vector3d get_vec3(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kSchema, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kSchema, std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

}  // namespace

void validate_manifest(const PartitionManifest& m) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kSchema, what); };
  if (m.version != kManifestVersion) {
    fail("unsupported manifest version " + std::to_string(m.version) + " (expected " +
         std::to_string(kManifestVersion) + ")");
  }
  if (m.cuts.m < 1 || m.cuts.n < 1) fail("grid must be at least 1x1");
  try {
    m.cuts.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (static_cast<int>(m.blocks.size()) != m.cuts.block_count()) {
    fail("expected " + std::to_string(m.cuts.block_count()) + " block records, found " +
         std::to_string(m.blocks.size()));
  }
  for (std::size_t b = 0; b < m.blocks.size(); ++b) {
    const auto& blk = m.blocks[b];
    const BlockRegion expect = block_region(m.cuts, blk.row, blk.col, m.delta);
    if (blk.block_id != expect.block_id || blk.block_id != static_cast<int>(b) + 1) {
      fail("block record " + std::to_string(b) + " has inconsistent block_id/row/col");
    }
    if ((blk.lo - expect.lo).cwiseAbs().maxCoeff() > 1e-12 ||
        (blk.hi - expect.hi).cwiseAbs().maxCoeff() > 1e-12) {
      fail("block " + std::to_string(blk.block_id) + " region does not match cuts and delta");
    }
    if (!std::is_sorted(blk.camera_ids.begin(), blk.camera_ids.end()) ||
        std::adjacent_find(blk.camera_ids.begin(), blk.camera_ids.end()) != blk.camera_ids.end()) {
      fail("block " + std::to_string(blk.block_id) + " camera_ids must be sorted and unique");
    }
    if (blk.camera_count != static_cast<int>(blk.camera_ids.size())) {
      fail("block " + std::to_string(blk.block_id) + " camera_count mismatch");
    }
  }
  if (static_cast<int>(m.provenance.objective_history.size()) > m.provenance.iterations) {
    fail("objective history longer than the iteration budget");
  }
}

std::string manifest_to_json(const PartitionManifest& m) {
  validate_manifest(m);
  Json j;
  j["version"] = m.version;
  j["grid"] = {{"m", m.cuts.m}, {"n", m.cuts.n}};
  j["cuts"] = {{"v", m.cuts.v}, {"h", m.cuts.h}};
  j["delta"] = vec2(m.delta);
  j["tau"] = m.tau;
  Json blocks = Json::array();
  for (const auto& b : m.blocks) {
    Json jb;
    jb["block_id"] = b.block_id;
    jb["row"] = b.row;
    jb["col"] = b.col;
    jb["region"] = {{"lo", vec2(b.lo)}, {"hi", vec2(b.hi)}};
    jb["camera_ids"] = b.camera_ids;
    jb["g_blk"] = b.g_blk;
    jb["g_vis"] = b.g_vis;
    jb["g_avgvis"] = b.g_avgvis;
    jb["area"] = b.area;
    jb["camera_count"] = b.camera_count;
    blocks.push_back(std::move(jb));
  }
  j["blocks"] = std::move(blocks);
  const auto& p = m.provenance;
  Json jp;
  jp["seed"] = p.seed;
  jp["iterations"] = p.iterations;
  jp["objective_history"] = p.objective_history;
  jp["delta_scale"] = p.delta_scale;
  jp["depth_downscale"] = p.depth_downscale;
  jp["stride"] = p.stride;
  jp["weight_floor"] = p.weight_floor;
  jp["scene"] = p.scene_path;
  jp["cams"] = p.cams_dir;
  jp["frame"] = {{"center", vec3(p.frame.center)}, {"radius", p.frame.radius},
                 {"axis_u", vec3(p.frame.axis_u)}, {"axis_v", vec3(p.frame.axis_v)},
                 {"lo", vec2(p.frame.lo)},         {"hi", vec2(p.frame.hi)}};
  Json clouds = Json::array();
  for (const auto& c : p.cloud_points) clouds.push_back({{"camera_id", c.camera_id}, {"k", c.points}});
  jp["cloud_points"] = std::move(clouds);
  j["provenance"] = std::move(jp);
  return j.dump(2) + "\n";
}

PartitionManifest manifest_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("manifest: ") + e.what());
  }
  PartitionManifest m;
  try {
    m.version = field(j, "version").get<int>();
    if (m.version != kManifestVersion) {
      throw Error(ErrorCode::kSchema, "unsupported manifest version " + std::to_string(m.version) +
                                          " (expected " + std::to_string(kManifestVersion) + ")");
    }
    const Json& grid = field(j, "grid");
    m.cuts.m = field(grid, "m").get<int>();
    m.cuts.n = field(grid, "n").get<int>();
    const Json& cuts = field(j, "cuts");
    m.cuts.v = field(cuts, "v").get<std::vector<double>>();
    m.cuts.h = field(cuts, "h").get<std::vector<double>>();
    m.delta = get_vec2(field(j, "delta"));
    m.tau = field(j, "tau").get<double>();
    for (const Json& jb : field(j, "blocks")) {
      ManifestBlock b;
      b.block_id = field(jb, "block_id").get<int>();
      b.row = field(jb, "row").get<int>();
      b.col = field(jb, "col").get<int>();
      const Json& region = field(jb, "region");
      b.lo = get_vec2(field(region, "lo"));
      b.hi = get_vec2(field(region, "hi"));
      b.camera_ids = field(jb, "camera_ids").get<std::vector<int>>();
      b.g_blk = field(jb, "g_blk").get<std::size_t>();
      b.g_vis = field(jb, "g_vis").get<std::size_t>();
      b.g_avgvis = field(jb, "g_avgvis").get<double>();
      b.area = field(jb, "area").get<double>();
      b.camera_count = field(jb, "camera_count").get<int>();
      m.blocks.push_back(std::move(b));
    }
    const Json& jp = field(j, "provenance");
    auto& p = m.provenance;
    p.seed = field(jp, "seed").get<std::uint64_t>();
    p.iterations = field(jp, "iterations").get<int>();
    p.objective_history = field(jp, "objective_history").get<std::vector<double>>();
    p.delta_scale = field(jp, "delta_scale").get<double>();
    p.depth_downscale = field(jp, "depth_downscale").get<int>();
    p.stride = field(jp, "stride").get<int>();
    p.weight_floor = field(jp, "weight_floor").get<double>();
    p.scene_path = field(jp, "scene").get<std::string>();
    p.cams_dir = field(jp, "cams").get<std::string>();
    const Json& jf = field(jp, "frame");
    p.frame.center = get_vec3(field(jf, "center"));
    p.frame.radius = field(jf, "radius").get<double>();
    p.frame.axis_u = get_vec3(field(jf, "axis_u"));
    p.frame.axis_v = get_vec3(field(jf, "axis_v"));
    p.frame.lo = get_vec2(field(jf, "lo"));
    p.frame.hi = get_vec2(field(jf, "hi"));
    for (const Json& jc : field(jp, "cloud_points")) {
      p.cloud_points.push_back({field(jc, "camera_id").get<int>(), field(jc, "k").get<std::size_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("manifest: ") + e.what());
  }
  validate_manifest(m);
  return m;
}

void write_manifest(const PartitionManifest& manifest, const std::filesystem::path& path) {
  const std::string text = manifest_to_json(manifest);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

PartitionManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

}  // namespace gspart
