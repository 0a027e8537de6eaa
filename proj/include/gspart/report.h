#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gspart/analysis.h"
#include "gspart/grid.h"
#include "gspart/partition.h"
#include "gspart/visibility.h"

namespace gspart {

struct E2EReport {
  Duration t_coarse;
  Duration t_partition;
  std::vector<BlockLoadStats> blocks;
  std::vector<Duration> t_fine;  // predicted, per block
  Duration t_e2e;
  RuntimeModel model;

  bool operator==(const E2EReport& other) const;
};

// Predicts t_fine per block from g_vis and fills t_e2e.
E2EReport make_e2e_report(std::vector<BlockLoadStats> blocks, const RuntimeModel& model,
                          Duration t_coarse, Duration t_partition);

enum class ReportFormat { kJson, kCsv };
ReportFormat parse_report_format(const std::string& text);  // kInvalidInput

std::string report_to_json(const E2EReport& report);
E2EReport report_from_json(const std::string& text);  // kSchema
// Header: block_id,area,camera_count,g_blk,g_vis,g_avgvis,t_fine_pred (minutes).
std::string report_to_csv(const E2EReport& report);
void emit_report(const E2EReport& report, const std::filesystem::path& path, ReportFormat format);

RuntimeModel runtime_model_from_json(const std::string& text);  // kSchema
std::string runtime_model_to_json(const RuntimeModel& model);

enum class Strategy { kUniform, kEqualCamera, kOptimized };
Strategy parse_strategy(const std::string& text);  // kInvalidInput
std::string to_string(Strategy s);

// Cuts at the i/m and j/n quantiles of the camera centers' grid
// coordinates, so each row and column band holds about the same number of
// cameras. Falls back to uniform cuts along an axis whose quantiles collapse.
GridCuts equal_camera_cuts(const SceneFrame& frame, std::span<const CameraView> cameras, int m,
                           int n);

struct StrategyResult {
  Strategy strategy = Strategy::kUniform;
  GridCuts cuts;
  std::vector<BlockLoadStats> stats;
  std::vector<double> t_fine_pred;  // minutes
  double max_t_fine = 0.0;
  std::size_t max_g_vis = 0;
};

struct Comparison {
  std::vector<StrategyResult> results;  // in the requested order
  std::size_t winner = 0;               // index into results
};

// Evaluates each strategy with the same delta/tau. The winner minimizes the
// predicted max t_fine; ties go to the earliest listed strategy.
Comparison compare_partitions(const PartitionProblem& problem, std::span<const Strategy> strategies,
                              const RuntimeModel& model, const PartitionOptions& options);

// strategy,block_id,area,camera_count,g_blk,g_vis,g_avgvis,t_fine_pred,winner
std::string comparison_to_csv(const Comparison& comparison);

}  // namespace gspart
