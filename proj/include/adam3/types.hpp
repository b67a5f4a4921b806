#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "adam3/errors.hpp"

namespace adam3 {

/// A flat parameter vector y = (theta, alpha). The first `split` entries are
/// the minimization block, the rest the maximization block.
struct Point {
  std::vector<double> values;
  std::size_t split = 0;

  std::size_t dim() const { return values.size(); }
};

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void validate(const Point& p) {
  if (p.values.empty()) throw config_error("point must have dimension >= 1");
  if (p.split > p.values.size()) throw config_error("point split exceeds dimension");
  if (!all_finite(p.values)) throw config_error("point has non-finite entries");
}

inline Point make_point(std::vector<double> values, std::size_t split) {
  Point p{std::move(values), split};
  validate(p);
  return p;
}

inline double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double linf_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

inline double l2_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

/// Integer power by square-and-multiply. Used for the beta1 schedule and the
/// bias-correction terms so every platform performs the identical sequence of
/// roundings (std::pow is not reproducible across libms).
inline double pow_u64(double base, std::uint64_t e) {
  double result = 1.0;
  double b = base;
  while (e != 0) {
    if (e & 1u) result *= b;
    e >>= 1u;
    if (e != 0) b *= b;
  }
  return result;
}

/// Step size and moment-decay settings shared by all methods. Fields a method
/// does not use (e.g. beta3 for simultaneous Adam) are ignored by it.
struct HyperParams {
  double eta = 1e-2;            ///< step size, > 0
  double beta1_1 = 0.0;         ///< initial momentum decay, in [0,1)
  double kappa = 1.0;           ///< momentum-schedule decay, in (0,1]; 1 = constant beta1
  double beta2 = 0.9;           ///< second-moment decay, in [0,1)
  double beta3 = 0.1;           ///< scaler-cap decay, in [0,1)
  std::size_t batch_m = 1;      ///< minibatch size, >= 1
  std::uint64_t n_iters = 10'000'000;  ///< iteration budget
  double eps_guard = 1e-8;      ///< constant added to v each step, >= 0
  double v0_init = 0.0;         ///< uniform initialization of v-tilde, >= 0

  /// beta1 at iteration k (1-based): beta1_1 * kappa^(k-1).
  double beta1_at(std::uint64_t k) const {
    if (kappa == 1.0) return beta1_1;
    return beta1_1 * pow_u64(kappa, k - 1);
  }

  /// gamma := beta1_1 / beta2; zero momentum makes gamma zero regardless of beta2.
  double gamma() const {
    if (beta1_1 == 0.0) return 0.0;
    return beta1_1 / beta2;
  }
};

inline void validate(const HyperParams& hp) {
  if (!(hp.eta > 0.0) || !std::isfinite(hp.eta)) throw config_error("eta must be positive");
  if (!(hp.beta1_1 >= 0.0 && hp.beta1_1 < 1.0)) throw config_error("beta1_1 must be in [0,1)");
  if (!(hp.kappa > 0.0 && hp.kappa <= 1.0)) throw config_error("kappa must be in (0,1]");
  if (!(hp.beta2 >= 0.0 && hp.beta2 < 1.0)) throw config_error("beta2 must be in [0,1)");
  if (!(hp.beta3 >= 0.0 && hp.beta3 < 1.0)) throw config_error("beta3 must be in [0,1)");
  if (hp.batch_m == 0) throw config_error("batch_m must be >= 1");
  if (hp.n_iters == 0) throw config_error("n_iters must be >= 1");
  if (!(hp.eps_guard >= 0.0)) throw config_error("eps_guard must be >= 0");
  if (!(hp.v0_init >= 0.0)) throw config_error("v0_init must be >= 0");
}

}  // namespace adam3
