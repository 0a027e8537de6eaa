#pragma once

#include <vector>

#include <Eigen/Core>

namespace gspart {

// m x n grid over [0,1]^2. v cuts the first grid axis into rows,
// h cuts the second into columns.
struct GridCuts {
  int m = 1;
  int n = 1;
  std::vector<double> v;  // m-1 entries, strictly increasing in (0,1)
  std::vector<double> h;  // n-1 entries, strictly increasing in (0,1)

  int block_count() const { return m * n; }
  // Throws kInvalidCuts on wrong lengths, ordering or range.
  void validate() const;

  // Decision vector layout: v followed by h.
  std::vector<double> flatten() const;
  static GridCuts unflatten(int m, int n, const std::vector<double>& x);

  // Boundary convention v_0 = 0, v_m = 1 (same for h); index in [0, m].
  double v_at(int i) const;
  double h_at(int j) const;

  bool operator==(const GridCuts& other) const = default;
};

// Closed-low, open-high box in grid coordinates. A side lying on the
// domain boundary (hi == 1) is closed so the cells of a grid tile [0,1]^2.
struct BlockRegion {
  int block_id = 1;
  int row = 1;
  int col = 1;
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Ones();

  bool contains(const Eigen::Vector2d& p) const {
    const bool in_x = p.x() >= lo.x() && (p.x() < hi.x() || (hi.x() >= 1.0 && p.x() <= hi.x()));
    const bool in_y = p.y() >= lo.y() && (p.y() < hi.y() || (hi.y() >= 1.0 && p.y() <= hi.y()));
    return in_x && in_y;
  }
  double area() const { return (hi.x() - lo.x()) * (hi.y() - lo.y()); }
};

// Row-major, 1-based: b = (i-1)*n + j.
inline int block_index(int i, int j, int n) { return (i - 1) * n + j; }

// (scale/m, scale/n); scale defaults to 0.1.
Eigen::Vector2d default_delta(int m, int n, double scale = 0.1);

// Cell (i, j) (1-based) grown by delta and clamped to [0,1]^2.
// Throws kInvalidIndex for indices outside the grid, kInvalidInput for delta < 0.
BlockRegion block_region(const GridCuts& cuts, int i, int j, const Eigen::Vector2d& delta);

// All regions in block order.
std::vector<BlockRegion> block_regions(const GridCuts& cuts, const Eigen::Vector2d& delta);

}  // namespace gspart
