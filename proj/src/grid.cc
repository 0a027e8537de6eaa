#include "gspart/grid.h"

#include <algorithm>
#include <string>

#include "gspart/error.h"

namespace gspart {

namespace {

void validate_axis(const std::vector<double>& cuts, int parts, const char* name) {
  if (static_cast<int>(cuts.size()) != parts - 1) {
    throw Error(ErrorCode::kInvalidCuts, std::string(name) + " must have " +
                                             std::to_string(parts - 1) + " entries");
  }
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    if (!(cuts[k] > 0.0 && cuts[k] < 1.0)) {
      throw Error(ErrorCode::kInvalidCuts, std::string(name) + " entries must lie in (0,1)");
    }
    if (k > 0 && !(cuts[k] > cuts[k - 1])) {
      throw Error(ErrorCode::kInvalidCuts, std::string(name) + " must be strictly increasing");
    }
  }
}

}  // namespace

void GridCuts::validate() const {
  if (m < 1 || n < 1) throw Error(ErrorCode::kInvalidCuts, "grid must be at least 1x1");
  validate_axis(v, m, "v");
  validate_axis(h, n, "h");
}

std::vector<double> GridCuts::flatten() const {
  std::vector<double> x = v;
  x.insert(x.end(), h.begin(), h.end());
  return x;
}

GridCuts GridCuts::unflatten(int m, int n, const std::vector<double>& x) {
  if (m < 1 || n < 1 || static_cast<int>(x.size()) != (m - 1) + (n - 1)) {
    throw Error(ErrorCode::kInvalidCuts, "decision vector does not match grid shape");
  }
  GridCuts cuts;
  cuts.m = m;
  cuts.n = n;
  cuts.v.assign(x.begin(), x.begin() + (m - 1));
  cuts.h.assign(x.begin() + (m - 1), x.end());
  return cuts;
}

double GridCuts::v_at(int i) const {
  if (i <= 0) return 0.0;
  if (i >= m) return 1.0;
  return v[static_cast<std::size_t>(i - 1)];
}

double GridCuts::h_at(int j) const {
  if (j <= 0) return 0.0;
  if (j >= n) return 1.0;
  return h[static_cast<std::size_t>(j - 1)];
}

Eigen::Vector2d default_delta(int m, int n, double scale) {
  return {scale / static_cast<double>(m), scale / static_cast<double>(n)};
}

BlockRegion block_region(const GridCuts& cuts, int i, int j, const Eigen::Vector2d& delta) {
  if (i < 1 || i > cuts.m || j < 1 || j > cuts.n) {
    throw Error(ErrorCode::kInvalidIndex, "block (" + std::to_string(i) + "," +
                                              std::to_string(j) + ") outside " +
                                              std::to_string(cuts.m) + "x" +
                                              std::to_string(cuts.n) + " grid");
  }
  if (!(delta.x() >= 0.0) || !(delta.y() >= 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "delta must be non-negative");
  }
  BlockRegion r;
  r.block_id = block_index(i, j, cuts.n);
  r.row = i;
  r.col = j;
  r.lo = {std::max(0.0, cuts.v_at(i - 1) - delta.x()), std::max(0.0, cuts.h_at(j - 1) - delta.y())};
  r.hi = {std::min(1.0, cuts.v_at(i) + delta.x()), std::min(1.0, cuts.h_at(j) + delta.y())};
  return r;
}

std::vector<BlockRegion> block_regions(const GridCuts& cuts, const Eigen::Vector2d& delta) {
  std::vector<BlockRegion> out;
  out.reserve(static_cast<std::size_t>(cuts.block_count()));
  for (int i = 1; i <= cuts.m; ++i) {
    for (int j = 1; j <= cuts.n; ++j) out.push_back(block_region(cuts, i, j, delta));
  }
  return out;
}

}  // namespace gspart
