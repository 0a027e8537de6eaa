#include "gspart/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "gspart/error.h"

namespace gspart {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidInput, "x and y must have the same length");
  }
  if (x.size() < 2) throw Error(ErrorCode::kInvalidInput, "at least 2 samples are required");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::kInvalidInput, "samples must be finite");
    }
  }
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (const double a : v) s += a;
  return s / static_cast<double>(v.size());
}

// Centered sums, two-pass for accuracy.
struct Moments {
  double sxx = 0.0, syy = 0.0, sxy = 0.0, mx = 0.0, my = 0.0;
};

Moments moments(std::span<const double> x, std::span<const double> y) {
  Moments m;
  m.mx = mean(x);
  m.my = mean(y);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - m.mx, dy = y[i] - m.my;
    m.sxx += dx * dx;
    m.syy += dy * dy;
    m.sxy += dx * dy;
  }
  return m;
}

}  // namespace

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const Moments m = moments(x, y);
  if (m.sxx == 0.0 || m.syy == 0.0) {
    throw Error(ErrorCode::kUndefinedCorrelation, "zero variance in x or y");
  }
  return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

double RuntimeModel::predict(double g_vis) const {
  return std::max(0.0, slope * g_vis + intercept);
}

void RuntimeModel::validate() const {
  if (!std::isfinite(slope) || !std::isfinite(intercept) || slope < 0.0) {
    throw Error(ErrorCode::kInvalidInput, "runtime model needs a finite, non-negative slope");
  }
}

RuntimeModel fit_runtime_model(std::span<const double> g_vis, std::span<const double> t_fine) {
  check_pair(g_vis, t_fine);
  const Moments m = moments(g_vis, t_fine);
  if (m.sxx == 0.0) {
    throw Error(ErrorCode::kUndefinedCorrelation, "g_vis is constant; slope is undefined");
  }
  RuntimeModel model;
  if (m.syy == 0.0) {
    model.intercept = m.my;
    return model;
  }
  model.slope = m.sxy / m.sxx;
  model.fit_r = pearson_r(g_vis, t_fine);
  if (model.slope < 0.0) {
    warn("fitted runtime slope is negative; clamping to 0");
    model.slope = 0.0;
  }
  model.intercept = m.my - model.slope * m.mx;
  return model;
}

Duration Duration::from_minutes(double minutes) {
  if (!std::isfinite(minutes)) throw Error(ErrorCode::kInvalidInput, "duration must be finite");
  return Duration(std::llround(minutes * 60.0));
}

Duration Duration::from_hhmm(const std::string& text) {
  int h = 0, m = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%d:%d%c", &h, &m, &tail) != 2 || h < 0 || m < 0 || m >= 60) {
    throw Error(ErrorCode::kParse, "expected hh:mm, got '" + text + "'");
  }
  return Duration((static_cast<std::int64_t>(h) * 60 + m) * 60);
}

std::string Duration::hhmm() const {
  const std::int64_t total = (std::abs(seconds_) + 30) / 60;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02lld:%02lld", seconds_ < 0 ? "-" : "",
                static_cast<long long>(total / 60), static_cast<long long>(total % 60));
  return buf;
}

Duration e2e_runtime(Duration t_coarse, Duration t_partition, std::span<const Duration> t_fine) {
  if (t_fine.empty()) throw Error(ErrorCode::kInvalidInput, "t_fine list is empty");
  const Duration zero;
  if (t_coarse < zero || t_partition < zero ||
      std::any_of(t_fine.begin(), t_fine.end(), [&](Duration d) { return d < zero; })) {
    throw Error(ErrorCode::kInvalidInput, "runtimes must be non-negative");
  }
  return t_coarse + t_partition + *std::max_element(t_fine.begin(), t_fine.end());
}

double e2e_runtime(double t_coarse, double t_partition, std::span<const double> t_fine) {
  if (t_coarse < 0.0 || t_partition < 0.0 ||
      std::any_of(t_fine.begin(), t_fine.end(), [](double t) { return t < 0.0; })) {
    throw Error(ErrorCode::kInvalidInput, "runtimes must be non-negative");
  }
  std::vector<Duration> fine;
  fine.reserve(t_fine.size());
  for (const double t : t_fine) fine.push_back(Duration::from_minutes(t));
  return e2e_runtime(Duration::from_minutes(t_coarse), Duration::from_minutes(t_partition), fine)
      .minutes();
}

}  // namespace gspart
