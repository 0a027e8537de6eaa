#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace gspart {

// Sample Pearson coefficient. Throws kInvalidInput on length mismatch or
// fewer than 2 samples, kUndefinedCorrelation when either side is constant.
double pearson_r(std::span<const double> x, std::span<const double> y);

// Affine runtime proxy t = slope * g_vis + intercept, in minutes.
struct RuntimeModel {
  double slope = 0.0;
  double intercept = 0.0;
  double fit_r = 0.0;

  double predict(double g_vis) const;
  void validate() const;  // kInvalidInput for negative or non-finite slope
};

// Ordinary least squares. A negative slope is clamped to 0 (intercept
// becomes the mean) with a warning. Constant t gives slope 0 and fit_r 0;
// constant g_vis throws kUndefinedCorrelation.
RuntimeModel fit_runtime_model(std::span<const double> g_vis, std::span<const double> t_fine);

// Whole seconds.
class Duration {
 public:
  constexpr Duration() = default;
  constexpr explicit Duration(std::int64_t seconds) : seconds_(seconds) {}
  static Duration from_minutes(double minutes);
  static Duration from_hhmm(const std::string& text);  // "hh:mm", kParse otherwise

  constexpr std::int64_t seconds() const { return seconds_; }
  double minutes() const { return static_cast<double>(seconds_) / 60.0; }
  // Rounded to the nearest minute, as in "01:24".
  std::string hhmm() const;

  constexpr auto operator<=>(const Duration&) const = default;
  constexpr Duration operator+(Duration o) const { return Duration(seconds_ + o.seconds_); }

 private:
  std::int64_t seconds_ = 0;
};

// t_coarse + t_partition + max(t_fine). Throws kInvalidInput for an empty
// list or negative input.
Duration e2e_runtime(Duration t_coarse, Duration t_partition, std::span<const Duration> t_fine);
double e2e_runtime(double t_coarse, double t_partition, std::span<const double> t_fine);

}  // namespace gspart
