#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "adam3/errors.hpp"
#include "adam3/types.hpp"

namespace adam3 {

/// State of the adaptive momentum extragradient method after iteration k.
///
/// Two point sequences are maintained: z is the extrapolated sequence at
/// which gradients are sampled, x the anchor sequence. The scaler v_tilde is
/// elementwise nondecreasing in k and satisfies v_tilde >= (1 - beta3) * v;
/// both properties hold exactly for states produced by adam3_step.
struct OptimizerState {
  Point x;
  Point z;
  std::vector<double> m_vec;     ///< momentum (first moment)
  std::vector<double> v_vec;     ///< second-moment moving average
  std::vector<double> v_tilde;   ///< capped scaler driving the step
  std::vector<double> d_vec;     ///< search direction v_tilde^(-1/2) .* m
  std::uint64_t k = 0;
};

/// Zero state: every vector is zero except v_tilde, which is uniformly
/// hp.v0_init. With v0_init = 0 this is the plain zero initialization; setting
/// v0_init >= G0^2 puts the run in the bounded-scaler regime some of the
/// diagnostics ask about.
inline OptimizerState adam3_init(std::size_t dim, std::size_t split, const HyperParams& hp) {
  if (dim == 0) throw config_error("dimension must be >= 1");
  if (split > dim) throw config_error("split exceeds dimension");
  validate(hp);

  OptimizerState s;
  s.x = Point{std::vector<double>(dim, 0.0), split};
  s.z = Point{std::vector<double>(dim, 0.0), split};
  s.m_vec.assign(dim, 0.0);
  s.v_vec.assign(dim, 0.0);
  s.v_tilde.assign(dim, hp.v0_init);
  s.d_vec.assign(dim, 0.0);
  s.k = 0;
  return s;
}

/**
 * One transition of the method. `grad_at` must return the minibatch-averaged
 * stochastic gradient field at the query point (sign already flipped on the
 * maximization block). For iteration k = state.k + 1:
 *
 *   z_k   = x_{k-1} - eta * d_{k-1}
 *   g_k   = grad_at(z_k)
 *   m_k   = beta1_k * m_{k-1} + (1 - beta1_k) * g_k,  beta1_k = beta1_1 * kappa^(k-1)
 *   v_k   = beta2 * v_{k-1} + (1 - beta2) * g_k .* g_k + eps_guard
 *   vt_k  = beta3 * vt_{k-1} + (1 - beta3) * max(vt_{k-1}, v_k)
 *   d_k   = vt_k^(-1/2) .* m_k
 *   x_k   = x_{k-1} - eta * d_k
 *
 * max() is elementwise. The vt update is clamped from below by vt_{k-1} so
 * that monotonicity holds exactly in floating point (in real arithmetic the
 * clamp never binds). A zero vt coordinate raises degenerate_scaling_error
 * instead of producing an infinite direction; this can only happen with
 * eps_guard = 0, v0_init = 0 and a zero gradient history in that coordinate.
 */
template <typename GradFn>
OptimizerState adam3_step(const OptimizerState& state, const HyperParams& hp, GradFn&& grad_at) {
  const std::size_t dim = state.x.dim();
  const std::uint64_t k = state.k + 1;
  const double beta1_k = hp.beta1_at(k);

  OptimizerState next;
  next.k = k;
  next.x = state.x;
  next.z = state.x;
  for (std::size_t r = 0; r < dim; ++r) {
    next.z.values[r] = state.x.values[r] - hp.eta * state.d_vec[r];
  }

  const std::vector<double> g = grad_at(next.z);
  if (g.size() != dim) throw config_error("gradient length does not match state dimension");

  next.m_vec.resize(dim);
  next.v_vec.resize(dim);
  next.v_tilde.resize(dim);
  next.d_vec.resize(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    next.m_vec[r] = beta1_k * state.m_vec[r] + (1.0 - beta1_k) * g[r];
    next.v_vec[r] = hp.beta2 * state.v_vec[r] + (1.0 - hp.beta2) * g[r] * g[r] + hp.eps_guard;
    const double capped = std::max(state.v_tilde[r], next.v_vec[r]);
    next.v_tilde[r] =
        std::max(hp.beta3 * state.v_tilde[r] + (1.0 - hp.beta3) * capped, state.v_tilde[r]);
    if (next.v_tilde[r] == 0.0) throw degenerate_scaling_error(r, k);
    next.d_vec[r] = (1.0 / std::sqrt(next.v_tilde[r])) * next.m_vec[r];
    next.x.values[r] = state.x.values[r] - hp.eta * next.d_vec[r];
  }
  return next;
}

}  // namespace adam3
