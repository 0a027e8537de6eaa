#pragma once

#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace gspart {

// Matern-5/2 correlation at scaled distance r >= 0.
double matern52(double r);

struct GPHyperparameters {
  std::vector<double> length_scales;  // one per input dimension
  double signal_variance = 1.0;
  double noise = 1e-6;                // diagonal jitter, standardized units
};

struct GPPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

struct GPFitOptions {
  bool optimize = true;       // fit hyperparameters by marginal likelihood
  int restarts = 3;
  int sweeps = 20;
  double noise_floor = 1e-6;
  double max_jitter = 1e-2;
  double min_length = 0.02;
  double max_length = 10.0;
  double min_signal = 0.05;
  double max_signal = 20.0;
  // Extra starting point for the search, e.g. the previous fit.
  const GPHyperparameters* warm_start = nullptr;
};

// Zero-mean GP over inputs in [0,1]^d with standardized targets.
class GPSurrogate {
 public:
  // Posterior of the latent function in standardized units.
  GPPrediction predict(std::span<const double> x) const;
  // Same, mapped back to target units.
  GPPrediction predict_original(std::span<const double> x) const;

  double standardize(double y) const { return (y - y_mean_) / y_scale_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  const GPHyperparameters& hyperparameters() const { return hyper_; }
  double log_marginal_likelihood() const { return lml_; }
  std::size_t size() const { return static_cast<std::size_t>(x_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(x_.cols()); }

 private:
  friend GPSurrogate gp_fit(const std::vector<std::vector<double>>&, std::span<const double>,
                            const GPFitOptions&);

  Eigen::MatrixXd x_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::VectorXd alpha_;
  GPHyperparameters hyper_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  double lml_ = 0.0;
};

// Fits a Matern-5/2 ARD GP. Length-scales and signal variance maximize the
// log marginal likelihood by multi-start coordinate search in log space.
// The diagonal jitter starts at noise_floor and grows x10 up to max_jitter
// when the kernel matrix is not positive definite; beyond that throws
// kConditioning. Requires at least two points.
GPSurrogate gp_fit(const std::vector<std::vector<double>>& x, std::span<const double> y,
                   const GPFitOptions& options = {});

}  // namespace gspart
