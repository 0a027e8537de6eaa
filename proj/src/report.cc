#include "gspart/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "gspart/error.h"

namespace gspart {

using Json = nlohmann::ordered_json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void append_stats_row(std::string& out, const BlockLoadStats& s, double t_fine) {
  out += std::to_string(s.block_id) + "," + fmt(s.area) + "," + std::to_string(s.camera_count) +
         "," + std::to_string(s.g_blk) + "," + std::to_string(s.g_vis) + "," + fmt(s.g_avgvis) +
         "," + fmt(t_fine);
}

Json model_json(const RuntimeModel& m) {
  return {{"slope", m.slope}, {"intercept", m.intercept}, {"fit_r", m.fit_r}};
}

RuntimeModel model_from(const Json& j) {
  RuntimeModel m;
  m.slope = j.at("slope").get<double>();
  m.intercept = j.at("intercept").get<double>();
  m.fit_r = j.value("fit_r", 0.0);
  m.validate();
  return m;
}

Json duration_json(Duration d) { return {{"seconds", d.seconds()}, {"hhmm", d.hhmm()}}; }
Duration duration_from(const Json& j) { return Duration(j.at("seconds").get<std::int64_t>()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace

bool E2EReport::operator==(const E2EReport& o) const {
  return t_coarse == o.t_coarse && t_partition == o.t_partition && blocks == o.blocks &&
         t_fine == o.t_fine && t_e2e == o.t_e2e && model.slope == o.model.slope &&
         model.intercept == o.model.intercept && model.fit_r == o.model.fit_r;
}

E2EReport make_e2e_report(std::vector<BlockLoadStats> blocks, const RuntimeModel& model,
                          Duration t_coarse, Duration t_partition) {
  model.validate();
  E2EReport r;
  r.t_coarse = t_coarse;
  r.t_partition = t_partition;
  r.model = model;
  r.blocks = std::move(blocks);
  for (const auto& s : r.blocks) {
    r.t_fine.push_back(Duration::from_minutes(model.predict(static_cast<double>(s.g_vis))));
  }
  r.t_e2e = e2e_runtime(t_coarse, t_partition, r.t_fine);
  return r;
}

ReportFormat parse_report_format(const std::string& text) {
  if (text == "json") return ReportFormat::kJson;
  if (text == "csv") return ReportFormat::kCsv;
  throw Error(ErrorCode::kInvalidInput, "unknown report format '" + text + "' (json|csv)");
}

std::string report_to_json(const E2EReport& r) {
  Json j;
  j["t_coarse"] = duration_json(r.t_coarse);
  j["t_partition"] = duration_json(r.t_partition);
  j["t_e2e"] = duration_json(r.t_e2e);
  j["model"] = model_json(r.model);
  Json blocks = Json::array();
  for (std::size_t b = 0; b < r.blocks.size(); ++b) {
    const auto& s = r.blocks[b];
    blocks.push_back({{"block_id", s.block_id},
                      {"area", s.area},
                      {"camera_count", s.camera_count},
                      {"g_blk", s.g_blk},
                      {"g_vis", s.g_vis},
                      {"g_avgvis", s.g_avgvis},
                      {"t_fine", duration_json(r.t_fine[b])}});
  }
  j["blocks"] = std::move(blocks);
  return j.dump(2) + "\n";
}

E2EReport report_from_json(const std::string& text) {
  try {
    const Json j = Json::parse(text);
    E2EReport r;
    r.t_coarse = duration_from(j.at("t_coarse"));
    r.t_partition = duration_from(j.at("t_partition"));
    r.t_e2e = duration_from(j.at("t_e2e"));
    r.model = model_from(j.at("model"));
    for (const auto& b : j.at("blocks")) {
      BlockLoadStats s;
      s.block_id = b.at("block_id").get<int>();
      s.area = b.at("area").get<double>();
      s.camera_count = b.at("camera_count").get<int>();
      s.g_blk = b.at("g_blk").get<std::size_t>();
      s.g_vis = b.at("g_vis").get<std::size_t>();
      s.g_avgvis = b.at("g_avgvis").get<double>();
      r.blocks.push_back(s);
      r.t_fine.push_back(duration_from(b.at("t_fine")));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("report: ") + e.what());
  }
}

std::string report_to_csv(const E2EReport& r) {
  std::string out = "block_id,area,camera_count,g_blk,g_vis,g_avgvis,t_fine_pred\n";
  for (std::size_t b = 0; b < r.blocks.size(); ++b) {
    append_stats_row(out, r.blocks[b], r.t_fine[b].minutes());
    out += "\n";
  }
  return out;
}

void emit_report(const E2EReport& report, const std::filesystem::path& path, ReportFormat format) {
  write_text(path, format == ReportFormat::kJson ? report_to_json(report) : report_to_csv(report));
}

RuntimeModel runtime_model_from_json(const std::string& text) {
  try {
    return model_from(Json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("runtime model: ") + e.what());
  }
}

std::string runtime_model_to_json(const RuntimeModel& model) {
  return model_json(model).dump(2) + "\n";
}

Strategy parse_strategy(const std::string& text) {
  if (text == "uniform") return Strategy::kUniform;
  if (text == "equal-camera") return Strategy::kEqualCamera;
  if (text == "optimized") return Strategy::kOptimized;
  throw Error(ErrorCode::kInvalidInput,
              "unknown strategy '" + text + "' (uniform|equal-camera|optimized)");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kUniform: return "uniform";
    case Strategy::kEqualCamera: return "equal-camera";
    case Strategy::kOptimized: return "optimized";
  }
  return "?";
}

GridCuts equal_camera_cuts(const SceneFrame& frame, std::span<const CameraView> cameras, int m,
                           int n) {
  GridCuts cuts = init_uniform_cuts(m, n);
  if (cameras.empty()) return cuts;
  std::vector<double> us, vs;
  for (const auto& c : cameras) {
    const Eigen::Vector2d p = frame.to_grid_clamped(c.center());
    us.push_back(p.x());
    vs.push_back(p.y());
  }
  auto quantile_cuts = [](std::vector<double> vals, int parts, std::vector<double>& out) {
    std::sort(vals.begin(), vals.end());
    std::vector<double> q;
    for (int i = 1; i < parts; ++i) {
      const double pos = static_cast<double>(i) * static_cast<double>(vals.size()) / parts;
      const auto k = static_cast<std::size_t>(pos);
      // Midway between neighbours when the split falls between two cameras.
      double c = (k > 0 && pos == static_cast<double>(k)) ? 0.5 * (vals[k - 1] + vals[k]) : vals[k];
      q.push_back(c);
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double prev = i == 0 ? 0.0 : q[i - 1];
      if (!(q[i] > prev) || !(q[i] < 1.0)) return;  // collapsed: keep uniform
    }
    out = q;
  };
  quantile_cuts(us, m, cuts.v);
  quantile_cuts(vs, n, cuts.h);
  return cuts;
}

Comparison compare_partitions(const PartitionProblem& problem, std::span<const Strategy> strategies,
                              const RuntimeModel& model, const PartitionOptions& options) {
  model.validate();
  const Eigen::Vector2d delta = default_delta(options.m, options.n, options.delta_scale);
  Comparison cmp;
  for (const Strategy s : strategies) {
    StrategyResult r;
    r.strategy = s;
    switch (s) {
      case Strategy::kUniform: r.cuts = init_uniform_cuts(options.m, options.n); break;
      case Strategy::kEqualCamera:
        r.cuts = equal_camera_cuts(problem.scene().frame(), problem.cameras(), options.m, options.n);
        break;
      case Strategy::kOptimized: r.cuts = optimize_partition(problem, options).cuts; break;
    }
    const ObjectiveResult obj = evaluate_objective(problem, r.cuts, delta, options.tau);
    r.stats = obj.stats;
    r.max_g_vis = obj.value;
    for (const auto& st : r.stats) {
      r.t_fine_pred.push_back(model.predict(static_cast<double>(st.g_vis)));
    }
    r.max_t_fine = r.t_fine_pred.empty()
                       ? 0.0
                       : *std::max_element(r.t_fine_pred.begin(), r.t_fine_pred.end());
    cmp.results.push_back(std::move(r));
  }
  for (std::size_t i = 1; i < cmp.results.size(); ++i) {
    if (cmp.results[i].max_t_fine < cmp.results[cmp.winner].max_t_fine) cmp.winner = i;
  }
  return cmp;
}

std::string comparison_to_csv(const Comparison& cmp) {
  std::string out = "strategy,block_id,area,camera_count,g_blk,g_vis,g_avgvis,t_fine_pred,winner\n";
  for (std::size_t i = 0; i < cmp.results.size(); ++i) {
    const auto& r = cmp.results[i];
    for (std::size_t b = 0; b < r.stats.size(); ++b) {
      out += to_string(r.strategy) + ",";
      append_stats_row(out, r.stats[b], r.t_fine_pred[b]);
      out += i == cmp.winner ? ",1\n" : ",0\n";
    }
  }
  return out;
}

}  // namespace gspart
