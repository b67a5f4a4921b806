#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "adam3/baselines.hpp"
#include "adam3/diagnostics.hpp"
#include "adam3/errors.hpp"
#include "adam3/games.hpp"
#include "adam3/optimizer.hpp"
#include "adam3/rng.hpp"
#include "adam3/types.hpp"

namespace adam3 {

enum class Method { adam3, sadam, oadagrad };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::adam3: return "adam3";
    case Method::sadam: return "sadam";
    case Method::oadagrad: return "oadagrad";
  }
  return "unknown";
}

/// Running aggregates kept for every iteration regardless of the trace
/// stride: the empirical gradient bound, first violations of the trajectory
/// invariants, and the telescoping sum of scaler increments.
struct RunAuditSummary {
  double g_inf_emp = 0.0;            ///< max over iterations of |g_k|_inf
  std::uint64_t moment_bound_violation = 0;    ///< first violating iteration, 0 = none
  std::uint64_t direction_bound_violation = 0;
  std::uint64_t monotone_violation = 0;
  bool direction_bound_applicable = false;
  double vdiff_l1_sum = 0.0;         ///< sum_k |vt_k - vt_{k-1}|_1
  std::vector<double> v_tilde_initial;
  std::vector<double> v_tilde_final;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  std::vector<OptimizerState> states;  ///< every iteration, only in audit mode
  RunAuditSummary audit;
  std::uint64_t iterations = 0;
  double terminal_e = std::numeric_limits<double>::quiet_NaN();
  double terminal_r = 0.0;
};

/// A non-finite coordinate appeared in the optimizer state. Diagnostics
/// recorded before the failing iteration are preserved in `partial`.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(std::uint64_t iteration, RunResult partial)
      : std::runtime_error("non-finite iterate at iteration " + std::to_string(iteration)),
        iteration(iteration),
        partial(std::move(partial)) {}

  std::uint64_t iteration;
  RunResult partial;
};

struct RunOptions {
  bool record_states = false;  ///< keep the full state history for audit_trace
};

namespace detail {

inline bool state_finite(const OptimizerState& s) {
  return all_finite(s.x.values) && all_finite(s.z.values) && all_finite(s.m_vec) &&
         all_finite(s.v_vec) && all_finite(s.v_tilde) && all_finite(s.d_vec);
}

inline double grad_norm_sq_at(const GameSpec& game, const Point& p,
                              const std::vector<double>& sampled) {
  if (game.exact_field) {
    const std::vector<double> f = game.exact_field(p);
    double s = 0.0;
    for (double v : f) s += v * v;
    return s;
  }
  double s = 0.0;
  for (double v : sampled) s += v * v;
  return s;
}

}  // namespace detail

/**
 * Runs n_iters iterations of the chosen method on a game, drawing gradient
 * noise from the documented per-iteration substreams of `seed`. Every
 * trace_stride-th iteration is appended to the trace. Identical
 * (game, hp, method, seed) inputs produce identical traces.
 *
 * Throws divergence_error if any state coordinate becomes non-finite; the
 * trace collected up to the failing iteration rides along in the exception.
 */
inline RunResult run_optimizer(const GameSpec& game, const HyperParams& hp, Method method,
                               std::uint64_t seed, std::uint64_t trace_stride,
                               const RunOptions& options = {}) {
  validate(hp);
  if (trace_stride == 0) throw config_error("trace_stride must be >= 1");
  if (game.dim == 0 || !game.sample_field) throw config_error("game is not fully specified");

  RunResult result;
  result.trace.reserve(static_cast<std::size_t>(hp.n_iters / trace_stride) + 1);

  const std::size_t dim = game.dim;
  const double gamma = hp.gamma();
  const bool direction_bound_applicable = gamma <= 1.0 && hp.kappa <= 1.0 && hp.eps_guard == 0.0;
  double direction_bound_value = std::numeric_limits<double>::infinity();
  if (direction_bound_applicable && gamma < 1.0) {
    const double uc =
        (1.0 - hp.beta3) * (1.0 - hp.beta1_1) * (1.0 - hp.beta2) * (1.0 - gamma);
    direction_bound_value = std::sqrt(static_cast<double>(dim) / uc);
  }
  result.audit.direction_bound_applicable = direction_bound_applicable;

  OptimizerState st;
  SAdamState sst;
  OAdagradState ost;
  switch (method) {
    case Method::adam3: st = adam3_init(dim, game.split, hp); break;
    case Method::sadam: sst = sadam_init(dim, game.split, hp); break;
    case Method::oadagrad: ost = oadagrad_init(dim, game.split, hp); break;
  }
  if (method == Method::adam3) {
    result.audit.v_tilde_initial = st.v_tilde;
    if (options.record_states) {
      result.states.reserve(static_cast<std::size_t>(hp.n_iters) + 1);
      result.states.push_back(st);
    }
  }

  // relative error is undefined for a zero-norm reference point
  const bool track_e = game.known_fne && l2_norm(game.known_fne->values) > 0.0;

  double r_sum = 0.0;
  std::vector<double> last_grad;
  for (std::uint64_t k = 1; k <= hp.n_iters; ++k) {
    SplitMix64 rng = iteration_stream(seed, k);
    auto grad_at = [&](const Point& p) {
      last_grad = game.sample_field(p, hp.batch_m, rng);
      return last_grad;
    };

    const Point* eval_point = nullptr;
    bool finite = true;
    bool moment_bounds_ok = true;
    bool direction_bound_ok = true;
    bool monotone_ok = true;

    if (method == Method::adam3) {
      OptimizerState next = adam3_step(st, hp, grad_at);
      const double g_linf = linf_norm(last_grad);
      result.audit.g_inf_emp = std::max(result.audit.g_inf_emp, g_linf);
      const double g_bound = result.audit.g_inf_emp;
      const double vt_bound =
          std::max(g_bound * g_bound +
                       (hp.eps_guard > 0.0 ? hp.eps_guard / (1.0 - hp.beta2) : 0.0),
                   linf_norm(result.audit.v_tilde_initial));
      moment_bounds_ok = detail::leq_with_slack(linf_norm(next.m_vec), g_bound) &&
                  detail::leq_with_slack(linf_norm(next.v_tilde), vt_bound);
      if (moment_bounds_ok == false && result.audit.moment_bound_violation == 0)
        result.audit.moment_bound_violation = k;
      if (direction_bound_applicable) {
        double norm_sq = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
          if (st.m_vec[r] != 0.0) norm_sq += st.m_vec[r] * st.m_vec[r] / next.v_tilde[r];
        }
        direction_bound_ok = detail::leq_with_slack(std::sqrt(norm_sq), direction_bound_value);
        if (!direction_bound_ok && result.audit.direction_bound_violation == 0) result.audit.direction_bound_violation = k;
      }
      for (std::size_t r = 0; r < dim; ++r) {
        if (next.v_tilde[r] < st.v_tilde[r] ||
            next.v_tilde[r] < (1.0 - hp.beta3) * next.v_vec[r]) {
          monotone_ok = false;
        }
        result.audit.vdiff_l1_sum += std::abs(next.v_tilde[r] - st.v_tilde[r]);
      }
      if (!monotone_ok && result.audit.monotone_violation == 0)
        result.audit.monotone_violation = k;

      st = std::move(next);
      if (options.record_states) result.states.push_back(st);
      eval_point = &st.z;
      finite = detail::state_finite(st);
    } else if (method == Method::sadam) {
      sst = sadam_step(sst, hp, grad_at);
      eval_point = &sst.x;
      finite = all_finite(sst.x.values) && all_finite(sst.m_vec) && all_finite(sst.v_vec);
    } else {
      ost = oadagrad_step(ost, hp, grad_at);
      eval_point = &ost.x;
      finite = all_finite(ost.x.values) && all_finite(ost.g_prev) && all_finite(ost.accum);
    }

    if (!finite) throw divergence_error(k, std::move(result));

    const double gsq = detail::grad_norm_sq_at(game, *eval_point, last_grad);
    r_sum += gsq;
    const double r_k = r_sum / static_cast<double>(k);
    result.terminal_r = r_k;
    if (track_e) result.terminal_e = relative_error(*eval_point, *game.known_fne);

    if (k % trace_stride == 0) {
      TraceRecord rec;
      rec.k = k;
      rec.z = *eval_point;
      if (track_e) rec.e_k = result.terminal_e;
      rec.grad_norm_sq = gsq;
      rec.r_k = r_k;
      rec.moment_bounds_ok = moment_bounds_ok;
      rec.direction_bound_ok = direction_bound_ok;
      rec.monotone_ok = monotone_ok;
      result.trace.push_back(std::move(rec));
    }
    result.iterations = k;
  }

  if (method == Method::adam3) result.audit.v_tilde_final = st.v_tilde;
  return result;
}

}  // namespace adam3
