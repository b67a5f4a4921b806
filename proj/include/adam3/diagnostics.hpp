#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adam3/errors.hpp"
#include "adam3/games.hpp"
#include "adam3/optimizer.hpp"
#include "adam3/rng.hpp"
#include "adam3/types.hpp"

namespace adam3 {

/// Per-iteration diagnostics recorded by the experiment runner.
/// e_k   = |z_k - z*| / |z*| (relative error to the known equilibrium)
/// R_k   = (1/k) * sum_{i<=k} |field(z_i)|^2 (running average over all
///         iterations, not just the recorded ones)
/// The three flags report the runtime invariant checks of the adaptive
/// momentum state; they are true for methods the checks do not apply to.
struct TraceRecord {
  std::uint64_t k = 0;
  Point z;
  std::optional<double> e_k;
  double grad_norm_sq = 0.0;
  double r_k = 0.0;
  bool moment_bounds_ok = true;
  bool direction_bound_ok = true;
  bool monotone_ok = true;
};

/// Euclidean relative error |z - z*| / |z*|.
inline double relative_error(const Point& z, const Point& z_star) {
  const double ref = l2_norm(z_star.values);
  if (ref == 0.0) throw config_error("relative error undefined for a zero reference point");
  return l2_dist(z.values, z_star.values) / ref;
}

/// Prefix means of a squared-gradient-norm history.
inline std::vector<double> running_avg_grad_norm(const std::vector<double>& history) {
  if (history.empty()) throw config_error("running average requires a nonempty history");
  std::vector<double> out(history.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    sum += history[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

/// Central-difference check of exact_field against exact_value. The
/// difference quotient of the maximization block is negated to match the
/// field convention. Returns the maximum over coordinates of
/// |fd - field| / max(1, |field|).
inline double finite_diff_check(const GameSpec& game, const Point& point, double h) {
  if (!game.exact_value) throw config_error("finite_diff_check requires exact_value");
  if (!game.exact_field) throw config_error("finite_diff_check requires exact_field");
  if (!(h > 0.0)) throw config_error("finite_diff_check requires h > 0");

  const std::vector<double> field = game.exact_field(point);
  double worst = 0.0;
  for (std::size_t r = 0; r < point.dim(); ++r) {
    Point plus = point;
    Point minus = point;
    plus.values[r] += h;
    minus.values[r] -= h;
    double fd = (game.exact_value(plus) - game.exact_value(minus)) / (2.0 * h);
    if (r >= point.split) fd = -fd;
    const double dev = std::abs(fd - field[r]) / std::max(1.0, std::abs(field[r]));
    worst = std::max(worst, dev);
  }
  return worst;
}

/// Constants named by the convergence assumptions: sup-norm gradient bound
/// G_inf, scaler floor G0, smoothness L, gradient variance sigma^2, and the
/// iterate-norm bound D (both |x*| and |x_k| are assumed <= D/2).
struct AssumptionConstants {
  double g_inf = 1.0;
  double g0 = 1.0;
  double l_smooth = 1.0;
  double sigma2 = 0.0;
  double d_bound = 0.0;  ///< 0 disables the iterate-norm check
};

inline void validate(const AssumptionConstants& ac) {
  if (!(ac.g_inf > 0.0)) throw config_error("G_inf must be positive");
  if (!(ac.g0 > 0.0)) throw config_error("G0 must be positive");
  if (!(ac.l_smooth > 0.0)) throw config_error("L must be positive");
  if (!(ac.sigma2 >= 0.0)) throw config_error("sigma2 must be >= 0");
  if (!(ac.d_bound >= 0.0)) throw config_error("D must be >= 0");
  if (ac.g0 > ac.g_inf)
    throw config_error("G0 <= G_inf required: a scaler floor above the gradient bound is "
                       "jointly infeasible with the moment bounds");
}

enum class CheckStatus { pass, fail, not_applicable };

struct InvariantResult {
  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::uint64_t first_violation = 0;  ///< iteration index, meaningful when status == fail
  std::string detail;
};

/// Outcome of auditing a full state history against the trajectory bounds.
struct AuditReport {
  std::vector<InvariantResult> results;
  bool zero_init_regime = true;  ///< v_tilde_0 below G0^2 (outside the bounded-scaler regime)

  bool all_ok() const {
    for (const auto& r : results) {
      if (r.status == CheckStatus::fail) return false;
    }
    return true;
  }

  const InvariantResult* find(const std::string& name) const {
    for (const auto& r : results) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }
};

namespace detail {

// Comparisons of real-arithmetic theorems on float data allow a few ulps.
inline bool leq_with_slack(double lhs, double rhs) {
  return lhs <= rhs * (1.0 + 1e-12) + 1e-300;
}

}  // namespace detail

/**
 * Audits a recorded trajectory. `states` must contain the state of every
 * iteration 0..N in order (full-state audit mode); `trace` may be any
 * stride-sampled subset and is used to cross-check the extrapolation
 * structure z_k = x_{k-1} - eta * d_{k-1} against the anchor sequence.
 *
 * Checks reported:
 *   momentum_bound     |m_k|_inf <= G_inf
 *   scaler_bound       |vt_k|_inf <= G_inf^2 + eps_guard / (1 - beta2)
 *                      (plus v0_init when the run starts above that level)
 *   direction_bound    |vt_k^(-1/2) .* m_{k-1}| <= sqrt(d / u_c); applicable
 *                      only when gamma <= 1, beta1 is nonincreasing and
 *                      eps_guard = 0, and vacuous at gamma = 1
 *   vt_monotone        vt_k >= vt_{k-1} elementwise, exactly
 *   vt_floor           vt_k >= (1 - beta3) * v_k elementwise, exactly
 *   vt_telescoping     sum_k |vt_k - vt_{k-1}|_1 equals sum_r (vt_{r,N} - vt_{r,0})
 *   extragradient      traced z_k recomputable from the stored states, exactly
 *   iterate_bound      |x_k| <= D/2, when D > 0
 */
inline AuditReport audit_trace(const std::vector<TraceRecord>& trace,
                               const std::vector<OptimizerState>& states, const HyperParams& hp,
                               const AssumptionConstants& ac) {
  validate(hp);
  validate(ac);
  AuditReport report;
  if (states.empty()) {
    report.results.push_back({"empty", CheckStatus::not_applicable, 0, "no states recorded"});
    return report;
  }
  const std::size_t n_states = states.size();
  const std::size_t dim = states.front().x.dim();
  for (const TraceRecord& rec : trace) {
    if (rec.k >= n_states)
      throw config_error("trace and state history do not match: record k=" +
                         std::to_string(rec.k) + " beyond last stored state");
  }

  report.zero_init_regime = linf_norm(states.front().v_tilde) < ac.g0 * ac.g0;

  InvariantResult momentum{"momentum_bound", CheckStatus::pass, 0, ""};
  InvariantResult scaler{"scaler_bound", CheckStatus::pass, 0, ""};
  InvariantResult direction{"direction_bound", CheckStatus::pass, 0, ""};
  InvariantResult monotone{"vt_monotone", CheckStatus::pass, 0, ""};
  InvariantResult floor{"vt_floor", CheckStatus::pass, 0, ""};
  InvariantResult telescoping{"vt_telescoping", CheckStatus::pass, 0, ""};
  InvariantResult extragradient{"extragradient", CheckStatus::pass, 0, ""};
  InvariantResult iterate{"iterate_bound", CheckStatus::pass, 0, ""};

  const double gamma = hp.gamma();
  double uc = 0.0;
  const bool beta1_nonincreasing = hp.kappa <= 1.0;
  const bool direction_applicable = gamma <= 1.0 && beta1_nonincreasing && hp.eps_guard == 0.0;
  if (!direction_applicable) {
    direction.status = CheckStatus::not_applicable;
    direction.detail = gamma > 1.0 ? "gamma > 1" : "eps_guard > 0";
  } else if (gamma < 1.0) {
    uc = (1.0 - hp.beta3) * (1.0 - hp.beta1_1) * (1.0 - hp.beta2) * (1.0 - gamma);
  }
  const double direction_bound =
      (direction_applicable && gamma < 1.0) ? std::sqrt(static_cast<double>(dim) / uc)
                                            : std::numeric_limits<double>::infinity();

  const double scaler_base = ac.g_inf * ac.g_inf +
                             (hp.eps_guard > 0.0 ? hp.eps_guard / (1.0 - hp.beta2) : 0.0);
  const double scaler_bound = std::max(scaler_base, linf_norm(states.front().v_tilde));

  double vdiff_sum = 0.0;
  for (std::size_t i = 1; i < n_states; ++i) {
    const OptimizerState& prev = states[i - 1];
    const OptimizerState& cur = states[i];
    const std::uint64_t k = cur.k;

    if (momentum.status == CheckStatus::pass &&
        !detail::leq_with_slack(linf_norm(cur.m_vec), ac.g_inf)) {
      momentum.status = CheckStatus::fail;
      momentum.first_violation = k;
    }
    if (scaler.status == CheckStatus::pass &&
        !detail::leq_with_slack(linf_norm(cur.v_tilde), scaler_bound)) {
      scaler.status = CheckStatus::fail;
      scaler.first_violation = k;
    }
    if (direction.status == CheckStatus::pass && direction_applicable) {
      double norm_sq = 0.0;
      for (std::size_t r = 0; r < dim; ++r) {
        if (prev.m_vec[r] != 0.0) norm_sq += prev.m_vec[r] * prev.m_vec[r] / cur.v_tilde[r];
      }
      if (!detail::leq_with_slack(std::sqrt(norm_sq), direction_bound)) {
        direction.status = CheckStatus::fail;
        direction.first_violation = k;
      }
    }
    for (std::size_t r = 0; r < dim; ++r) {
      if (monotone.status == CheckStatus::pass && cur.v_tilde[r] < prev.v_tilde[r]) {
        monotone.status = CheckStatus::fail;
        monotone.first_violation = k;
      }
      if (floor.status == CheckStatus::pass &&
          cur.v_tilde[r] < (1.0 - hp.beta3) * cur.v_vec[r]) {
        floor.status = CheckStatus::fail;
        floor.first_violation = k;
      }
      vdiff_sum += std::abs(cur.v_tilde[r] - prev.v_tilde[r]);
    }
    if (iterate.status == CheckStatus::pass && ac.d_bound > 0.0 &&
        l2_norm(cur.x.values) > ac.d_bound / 2.0) {
      iterate.status = CheckStatus::fail;
      iterate.first_violation = k;
    }
  }
  if (ac.d_bound == 0.0) {
    iterate.status = CheckStatus::not_applicable;
    iterate.detail = "no D supplied";
  }

  // Telescoping sum of the monotone scaler (p = 1): the l1 increments must
  // add up to the endpoint difference, up to summation rounding.
  double endpoint = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    endpoint += states.back().v_tilde[r] - states.front().v_tilde[r];
  }
  const double scale = std::max({vdiff_sum, endpoint, 1e-300});
  if (std::abs(vdiff_sum - endpoint) > 1e-9 * scale) {
    telescoping.status = CheckStatus::fail;
    telescoping.first_violation = states.back().k;
    telescoping.detail = "sum " + std::to_string(vdiff_sum) + " vs endpoints " +
                         std::to_string(endpoint);
  }

  for (const TraceRecord& rec : trace) {
    if (rec.k == 0 || extragradient.status != CheckStatus::pass) continue;
    const OptimizerState& prev = states[rec.k - 1];
    for (std::size_t r = 0; r < dim; ++r) {
      const double expected = prev.x.values[r] - hp.eta * prev.d_vec[r];
      if (rec.z.values[r] != expected) {
        extragradient.status = CheckStatus::fail;
        extragradient.first_violation = rec.k;
        break;
      }
    }
  }

  report.results = {momentum, scaler, direction, monotone,
                    floor,    telescoping, extragradient, iterate};
  return report;
}

// --- Statistical validators for the sampling assumptions ------------------

struct StatCheck {
  bool pass = true;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

/// E[sample_field] = exact_field, tested with a 4-standard-error band per
/// coordinate at the given point.
inline StatCheck unbiasedness_check(const GameSpec& game, const Point& point, std::size_t n_draws,
                                    std::uint64_t seed) {
  if (!game.exact_field) throw config_error("unbiasedness check requires exact_field");
  SplitMix64 rng(splitmix64_mix(seed));
  const std::size_t dim = game.dim;
  std::vector<double> mean(dim, 0.0);
  std::vector<double> m2(dim, 0.0);
  for (std::size_t i = 0; i < n_draws; ++i) {
    const std::vector<double> g = game.sample_field(point, 1, rng);
    for (std::size_t r = 0; r < dim; ++r) {
      const double delta = g[r] - mean[r];
      mean[r] += delta / static_cast<double>(i + 1);
      m2[r] += delta * (g[r] - mean[r]);
    }
  }
  const std::vector<double> exact = game.exact_field(point);
  StatCheck out;
  for (std::size_t r = 0; r < dim; ++r) {
    const double var = m2[r] / static_cast<double>(n_draws - 1);
    const double se = std::sqrt(var / static_cast<double>(n_draws));
    const double err = std::abs(mean[r] - exact[r]);
    const double tol = 4.0 * se + 1e-12;
    if (err > tol) out.pass = false;
    if (err > out.observed) {
      out.observed = err;
      out.expected = 0.0;
      out.tolerance = tol;
    }
  }
  return out;
}

/// Empirical E|g - E g|^2 of single-sample fields against an analytic value,
/// with a 4-standard-error band estimated from the sampled squared deviations.
inline StatCheck variance_check(const GameSpec& game, const Point& point, double expected_var,
                                std::size_t n_draws, std::uint64_t seed) {
  SplitMix64 rng(splitmix64_mix(seed ^ 0x5bf0'3635'dcf2'6d4full));
  const std::size_t dim = game.dim;
  std::vector<std::vector<double>> draws;
  draws.reserve(n_draws);
  std::vector<double> mean(dim, 0.0);
  for (std::size_t i = 0; i < n_draws; ++i) {
    draws.push_back(game.sample_field(point, 1, rng));
    for (std::size_t r = 0; r < dim; ++r) mean[r] += draws.back()[r];
  }
  for (std::size_t r = 0; r < dim; ++r) mean[r] /= static_cast<double>(n_draws);

  double var_mean = 0.0;
  double var_m2 = 0.0;
  for (std::size_t i = 0; i < n_draws; ++i) {
    double dev_sq = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      const double d = draws[i][r] - mean[r];
      dev_sq += d * d;
    }
    const double delta = dev_sq - var_mean;
    var_mean += delta / static_cast<double>(i + 1);
    var_m2 += delta * (dev_sq - var_mean);
  }
  const double se = std::sqrt(var_m2 / static_cast<double>(n_draws - 1) /
                              static_cast<double>(n_draws));
  StatCheck out;
  out.observed = var_mean;
  out.expected = expected_var;
  out.tolerance = 4.0 * se + 1e-12;
  out.pass = std::abs(var_mean - expected_var) <= out.tolerance;
  return out;
}

/// Minty condition spot check: <x - x*, field(x)> >= 0 on random points in a
/// box of the given half-width around x*.
inline StatCheck minty_check(const GameSpec& game, const Point& x_star, std::size_t n_points,
                             double half_width, std::uint64_t seed) {
  if (!game.exact_field) throw config_error("minty check requires exact_field");
  SplitMix64 rng(splitmix64_mix(seed ^ 0x94d0'49bb'1331'11ebull));
  StatCheck out;
  out.observed = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_points; ++i) {
    Point p = x_star;
    for (double& v : p.values) v += (2.0 * rng.next_double() - 1.0) * half_width;
    const std::vector<double> f = game.exact_field(p);
    double inner = 0.0;
    double scale = 0.0;
    for (std::size_t r = 0; r < p.dim(); ++r) {
      const double u = p.values[r] - x_star.values[r];
      inner += u * f[r];
      scale += std::abs(u * f[r]);
    }
    if (inner < -1e-12 * std::max(1.0, scale)) out.pass = false;
    out.observed = std::min(out.observed, inner);
  }
  return out;
}

/// Lipschitz check: |field(x) - field(y)| <= L |x - y| on random pairs.
inline StatCheck smoothness_check(const GameSpec& game, double l_smooth, std::size_t n_pairs,
                                  double half_width, std::uint64_t seed) {
  if (!game.exact_field) throw config_error("smoothness check requires exact_field");
  SplitMix64 rng(splitmix64_mix(seed ^ 0xbf58'476d'1ce4'e5b9ull));
  StatCheck out;
  out.expected = l_smooth;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    Point a{std::vector<double>(game.dim), game.split};
    Point b{std::vector<double>(game.dim), game.split};
    for (std::size_t r = 0; r < game.dim; ++r) {
      a.values[r] = (2.0 * rng.next_double() - 1.0) * half_width;
      b.values[r] = (2.0 * rng.next_double() - 1.0) * half_width;
    }
    const double dist = l2_dist(a.values, b.values);
    if (dist == 0.0) continue;
    const double df = l2_dist(game.exact_field(a), game.exact_field(b));
    const double ratio = df / dist;
    out.observed = std::max(out.observed, ratio);
    if (ratio > l_smooth * (1.0 + 1e-9)) out.pass = false;
  }
  return out;
}

/// Scaler-floor assumption: |vt_0|_inf >= G0^2.
inline bool v0_check(const std::vector<double>& v_tilde0, double g0) {
  return linf_norm(v_tilde0) >= g0 * g0;
}

}  // namespace adam3
