#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gspart/gp.h"

namespace gspart {

// Box constraints on the flattened cut vector (v then h).
struct CutBounds {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(std::span<const double> x) const;
  std::vector<double> to_unit(std::span<const double> x) const;
  std::vector<double> from_unit(std::span<const double> u) const;

  // Each cut of the uniform m x n grid may move at most halfway toward its
  // neighbours: v_i in [(2i-1)/(2m), (2i+1)/(2m)]. The upper end of every
  // cut that has a successor is pulled in by 1e-9 so cuts stay strictly
  // increasing anywhere in the box.
  static CutBounds around_uniform(int m, int n);
};

// Expected improvement for minimization; max(0, best - mean) when sigma = 0.
double expected_improvement(double mean, double sigma, double best);

// EI of the surrogate at x (unit coordinates) against best_y (target units).
double acquisition_ei(const GPSurrogate& surrogate, std::span<const double> x_unit,
                      double best_y);

// Halton points in [0,1)^d with a random Cranley-Patterson shift.
class ShiftedHalton {
 public:
  ShiftedHalton(std::size_t dim, std::mt19937_64& rng);
  std::vector<double> next();

 private:
  std::vector<double> shift_;
  std::uint64_t index_ = 1;
};

struct ProposalOptions {
  int samples = 1024;
  int refine_steps = 20;
  double initial_step = 0.1;  // unit-cube pattern-search step
};

// Maximizes EI over quasi-random samples, then refines the best sample by
// pattern search. Returns cut coordinates inside bounds.
std::vector<double> propose_candidate(const GPSurrogate& surrogate, const CutBounds& bounds,
                                      double best_y, std::mt19937_64& rng,
                                      const ProposalOptions& options = {});

}  // namespace gspart
