#include "gspart/bayes_opt.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gspart/error.h"

namespace gspart {

bool CutBounds::contains(std::span<const double> x) const {
  if (x.size() != dim()) return false;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] >= lo[k] && x[k] <= hi[k])) return false;
  }
  return true;
}

std::vector<double> CutBounds::to_unit(std::span<const double> x) const {
  std::vector<double> u(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double w = hi[k] - lo[k];
    u[k] = w > 0.0 ? (x[k] - lo[k]) / w : 0.0;
  }
  return u;
}

std::vector<double> CutBounds::from_unit(std::span<const double> u) const {
  std::vector<double> x(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    x[k] = std::clamp(lo[k] + std::clamp(u[k], 0.0, 1.0) * (hi[k] - lo[k]), lo[k], hi[k]);
  }
  return x;
}

CutBounds CutBounds::around_uniform(int m, int n) {
  if (m < 1 || n < 1) throw Error(ErrorCode::kInvalidInput, "grid must be at least 1x1");
  CutBounds b;
  auto axis = [&](int parts) {
    for (int i = 1; i < parts; ++i) {
      b.lo.push_back((2.0 * i - 1.0) / (2.0 * parts));
      double hi = (2.0 * i + 1.0) / (2.0 * parts);
      if (i + 1 < parts) hi -= 1e-9;
      b.hi.push_back(hi);
    }
  };
  axis(m);
  axis(n);
  return b;
}

double expected_improvement(double mean, double sigma, double best) {
  const double gap = best - mean;
  if (!(sigma > 1e-300)) return std::max(0.0, gap);
  const double z = gap / sigma;
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  return std::max(0.0, gap * cdf + sigma * pdf);
}

double acquisition_ei(const GPSurrogate& surrogate, std::span<const double> x_unit,
                      double best_y) {
  const GPPrediction p = surrogate.predict_original(x_unit);
  return expected_improvement(p.mean, std::sqrt(p.variance), best_y);
}

namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

constexpr std::uint64_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                                     37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79};

}  // namespace

ShiftedHalton::ShiftedHalton(std::size_t dim, std::mt19937_64& rng) {
  if (dim > std::size(kPrimes)) {
    throw Error(ErrorCode::kInvalidInput, "too many dimensions for the Halton sequence");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < dim; ++k) shift_.push_back(unit(rng));
}

std::vector<double> ShiftedHalton::next() {
  std::vector<double> u(shift_.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double x = radical_inverse(index_, kPrimes[k]) + shift_[k];
    u[k] = x - std::floor(x);
  }
  ++index_;
  return u;
}

std::vector<double> propose_candidate(const GPSurrogate& surrogate, const CutBounds& bounds,
                                      double best_y, std::mt19937_64& rng,
                                      const ProposalOptions& options) {
  const std::size_t d = bounds.dim();
  if (d == 0) return {};
  ShiftedHalton halton(d, rng);
  std::vector<double> best_u;
  double best_ei = -1.0;
  for (int s = 0; s < options.samples; ++s) {
    auto u = halton.next();
    const double ei = acquisition_ei(surrogate, u, best_y);
    if (ei > best_ei) {
      best_ei = ei;
      best_u = std::move(u);
    }
  }
  double step = options.initial_step;
  for (int it = 0; it < options.refine_steps; ++it) {
    std::vector<double> move;
    double move_ei = best_ei;
    for (std::size_t k = 0; k < d; ++k) {
      for (const double sign : {1.0, -1.0}) {
        auto u = best_u;
        u[k] = std::clamp(u[k] + sign * step, 0.0, 1.0);
        if (u[k] == best_u[k]) continue;
        const double ei = acquisition_ei(surrogate, u, best_y);
        if (ei > move_ei) {
          move_ei = ei;
          move = std::move(u);
        }
      }
    }
    if (move.empty()) {
      step *= 0.5;
    } else {
      best_u = std::move(move);
      best_ei = move_ei;
    }
  }
  return bounds.from_unit(best_u);
}

}  // namespace gspart
