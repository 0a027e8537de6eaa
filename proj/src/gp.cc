#include "gspart/gp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "gspart/error.h"

namespace gspart {

double matern52(double r) {
  const double s = std::sqrt(5.0) * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

namespace {

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const GPHyperparameters& h) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = h.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      double r2 = 0.0;
      for (Eigen::Index a = 0; a < d; ++a) {
        const double t = (x(i, a) - x(j, a)) / h.length_scales[static_cast<std::size_t>(a)];
        r2 += t * t;
      }
      k(i, j) = k(j, i) = h.signal_variance * matern52(std::sqrt(r2));
    }
  }
  return k;
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> chol;
  double jitter = 0.0;
};

// Cholesky with escalating diagonal jitter.
std::optional<Factorization> factorize(const Eigen::MatrixXd& k, double jitter,
                                       double max_jitter) {
  const Eigen::Index n = k.rows();
  for (;;) {
    Factorization f;
    f.jitter = jitter;
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    f.chol.compute(kj);
    if (f.chol.info() == Eigen::Success && f.chol.matrixLLT().diagonal().minCoeff() > 0.0) {
      (void)n;
      return f;
    }
    if (jitter >= max_jitter) return std::nullopt;
    jitter = std::min(max_jitter, jitter * 10.0);
  }
}

double lml_from(const Factorization& f, const Eigen::VectorXd& y) {
  const Eigen::VectorXd alpha = f.chol.solve(y);
  const double log_det = 2.0 * f.chol.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y.dot(alpha) - 0.5 * log_det -
         0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
}

double evaluate_lml(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const GPHyperparameters& h, const GPFitOptions& o) {
  const auto f = factorize(kernel_matrix(x, h), o.noise_floor, o.max_jitter);
  if (!f) return -std::numeric_limits<double>::infinity();
  return lml_from(*f, y);
}

// theta = (log l_1..l_d, log signal_variance)
GPHyperparameters from_theta(const std::vector<double>& theta, double noise) {
  GPHyperparameters h;
  h.length_scales.assign(theta.begin(), theta.end() - 1);
  for (auto& l : h.length_scales) l = std::exp(l);
  h.signal_variance = std::exp(theta.back());
  h.noise = noise;
  return h;
}

}  // namespace

GPPrediction GPSurrogate::predict(std::span<const double> x) const {
  const Eigen::Index n = x_.rows();
  const Eigen::Index d = x_.cols();
  if (static_cast<Eigen::Index>(x.size()) != d) {
    throw Error(ErrorCode::kInvalidInput, "GP query has wrong dimension");
  }
  Eigen::VectorXd k(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double r2 = 0.0;
    for (Eigen::Index a = 0; a < d; ++a) {
      const double t = (x[static_cast<std::size_t>(a)] - x_(i, a)) /
                       hyper_.length_scales[static_cast<std::size_t>(a)];
      r2 += t * t;
    }
    k(i) = hyper_.signal_variance * matern52(std::sqrt(r2));
  }
  GPPrediction p;
  p.mean = k.dot(alpha_);
  const Eigen::VectorXd v = chol_.matrixL().solve(k);
  p.variance = std::max(0.0, hyper_.signal_variance - v.squaredNorm());
  return p;
}

GPPrediction GPSurrogate::predict_original(std::span<const double> x) const {
  GPPrediction p = predict(x);
  p.mean = y_mean_ + y_scale_ * p.mean;
  p.variance *= y_scale_ * y_scale_;
  return p;
}

GPSurrogate gp_fit(const std::vector<std::vector<double>>& x, std::span<const double> y,
                   const GPFitOptions& o) {
  if (x.size() < 2 || x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidInput, "gp_fit needs >= 2 points with matching targets");
  }
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto d = static_cast<Eigen::Index>(x.front().size());
  GPSurrogate gp;
  gp.x_.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(x[static_cast<std::size_t>(i)].size()) != d) {
      throw Error(ErrorCode::kInvalidInput, "gp_fit inputs have inconsistent dimension");
    }
    for (Eigen::Index a = 0; a < d; ++a) gp.x_(i, a) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
  }

  double mean = 0.0;
  for (const double v : y) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  gp.y_mean_ = mean;
  gp.y_scale_ = var > 1e-24 * std::max(1.0, mean * mean) ? std::sqrt(var) : 1.0;
  Eigen::VectorXd ys(n);
  for (Eigen::Index i = 0; i < n; ++i) ys(i) = gp.standardize(y[static_cast<std::size_t>(i)]);

  const double lo_l = std::log(o.min_length), hi_l = std::log(o.max_length);
  const double lo_s = std::log(o.min_signal), hi_s = std::log(o.max_signal);
  auto clamp_theta = [&](std::vector<double>& t) {
    for (std::size_t a = 0; a + 1 < t.size(); ++a) t[a] = std::clamp(t[a], lo_l, hi_l);
    t.back() = std::clamp(t.back(), lo_s, hi_s);
  };

  std::vector<double> best_theta(static_cast<std::size_t>(d) + 1, 0.0);
  best_theta.back() = 0.0;
  for (std::size_t a = 0; a + 1 < best_theta.size(); ++a) best_theta[a] = std::log(0.3);

  if (o.optimize && d > 0) {
    std::vector<std::vector<double>> starts;
    for (int r = 0; r < o.restarts; ++r) {
      const double l0 = 0.1 * std::pow(3.0, r);  // 0.1, 0.3, 0.9, ...
      std::vector<double> t(static_cast<std::size_t>(d) + 1, std::log(l0));
      t.back() = 0.0;
      starts.push_back(t);
    }
    if (o.warm_start && static_cast<Eigen::Index>(o.warm_start->length_scales.size()) == d) {
      std::vector<double> t;
      for (const double l : o.warm_start->length_scales) t.push_back(std::log(l));
      t.push_back(std::log(o.warm_start->signal_variance));
      starts.insert(starts.begin(), t);
    }
    double best_val = -std::numeric_limits<double>::infinity();
    for (auto theta : starts) {
      clamp_theta(theta);
      double val = evaluate_lml(gp.x_, ys, from_theta(theta, o.noise_floor), o);
      double step = 1.0;
      for (int sweep = 0; sweep < o.sweeps && step > 1e-2; ++sweep) {
        bool improved = false;
        for (std::size_t a = 0; a < theta.size(); ++a) {
          for (const double sign : {1.0, -1.0}) {
            auto trial = theta;
            trial[a] += sign * step;
            clamp_theta(trial);
            if (trial[a] == theta[a]) continue;
            const double tv = evaluate_lml(gp.x_, ys, from_theta(trial, o.noise_floor), o);
            if (tv > val) {
              val = tv;
              theta = trial;
              improved = true;
              break;
            }
          }
        }
        if (!improved) step *= 0.5;
      }
      if (val > best_val) {
        best_val = val;
        best_theta = theta;
      }
    }
  } else if (o.warm_start && static_cast<Eigen::Index>(o.warm_start->length_scales.size()) == d) {
    for (Eigen::Index a = 0; a < d; ++a) {
      best_theta[static_cast<std::size_t>(a)] = std::log(o.warm_start->length_scales[static_cast<std::size_t>(a)]);
    }
    best_theta.back() = std::log(o.warm_start->signal_variance);
  }

  gp.hyper_ = from_theta(best_theta, o.noise_floor);
  auto f = factorize(kernel_matrix(gp.x_, gp.hyper_), o.noise_floor, o.max_jitter);
  if (!f) {
    throw Error(ErrorCode::kConditioning,
                "kernel matrix not positive definite with jitter up to " +
                    std::to_string(o.max_jitter));
  }
  gp.hyper_.noise = f->jitter;
  gp.chol_ = std::move(f->chol);
  gp.alpha_ = gp.chol_.solve(ys);
  gp.lml_ = lml_from(Factorization{gp.chol_, gp.hyper_.noise}, ys);
  return gp;
}

}  // namespace gspart
