#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "adam3/errors.hpp"
#include "adam3/types.hpp"

namespace adam3 {

/// Simultaneous Adam: both players take a bias-corrected Adam step on the
/// gradient field at x, with no extrapolation. beta1_1 and beta2 are the Adam
/// decays; kappa, beta3 and v0_init are ignored.
struct SAdamState {
  Point x;
  std::vector<double> m_vec;
  std::vector<double> v_vec;
  std::uint64_t k = 0;
};

inline SAdamState sadam_init(std::size_t dim, std::size_t split, const HyperParams& hp) {
  if (dim == 0) throw config_error("dimension must be >= 1");
  if (split > dim) throw config_error("split exceeds dimension");
  validate(hp);
  SAdamState s;
  s.x = Point{std::vector<double>(dim, 0.0), split};
  s.m_vec.assign(dim, 0.0);
  s.v_vec.assign(dim, 0.0);
  s.k = 0;
  return s;
}

/// x_k = x_{k-1} - eta * m_hat / (sqrt(v_hat) + eps_guard), with the usual
/// 1 - beta^k bias corrections.
template <typename GradFn>
SAdamState sadam_step(const SAdamState& state, const HyperParams& hp, GradFn&& grad_at) {
  const std::size_t dim = state.x.dim();
  const std::uint64_t k = state.k + 1;

  SAdamState next;
  next.k = k;
  next.x = state.x;
  const std::vector<double> g = grad_at(state.x);
  if (g.size() != dim) throw config_error("gradient length does not match state dimension");

  const double m_corr = 1.0 - pow_u64(hp.beta1_1, k);
  const double v_corr = 1.0 - pow_u64(hp.beta2, k);
  next.m_vec.resize(dim);
  next.v_vec.resize(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    next.m_vec[r] = hp.beta1_1 * state.m_vec[r] + (1.0 - hp.beta1_1) * g[r];
    next.v_vec[r] = hp.beta2 * state.v_vec[r] + (1.0 - hp.beta2) * g[r] * g[r];
    const double m_hat = next.m_vec[r] / m_corr;
    const double v_hat = next.v_vec[r] / v_corr;
    next.x.values[r] = state.x.values[r] - hp.eta * m_hat / (std::sqrt(v_hat) + hp.eps_guard);
  }
  return next;
}

/// Optimistic AdaGrad: the AdaGrad scaler with the optimistic extrapolation
/// 2 g_k - g_{k-1} in place of the plain gradient.
struct OAdagradState {
  Point x;
  std::vector<double> g_prev;  ///< previous gradient estimate
  std::vector<double> accum;   ///< running sum of squared gradients
  std::uint64_t k = 0;
};

inline OAdagradState oadagrad_init(std::size_t dim, std::size_t split, const HyperParams& hp) {
  if (dim == 0) throw config_error("dimension must be >= 1");
  if (split > dim) throw config_error("split exceeds dimension");
  validate(hp);
  OAdagradState s;
  s.x = Point{std::vector<double>(dim, 0.0), split};
  s.g_prev.assign(dim, 0.0);
  s.accum.assign(dim, 0.0);
  s.k = 0;
  return s;
}

/// x_k = x_{k-1} - eta * (2 g_k - g_{k-1}) / sqrt(accum_k + eps_guard) with
/// accum_k = accum_{k-1} + g_k .* g_k.
template <typename GradFn>
OAdagradState oadagrad_step(const OAdagradState& state, const HyperParams& hp, GradFn&& grad_at) {
  const std::size_t dim = state.x.dim();

  OAdagradState next;
  next.k = state.k + 1;
  next.x = state.x;
  const std::vector<double> g = grad_at(state.x);
  if (g.size() != dim) throw config_error("gradient length does not match state dimension");

  next.g_prev = g;
  next.accum.resize(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    next.accum[r] = state.accum[r] + g[r] * g[r];
    const double scale = std::sqrt(next.accum[r] + hp.eps_guard);
    const double extrapolated = 2.0 * g[r] - state.g_prev[r];
    next.x.values[r] = state.x.values[r] - hp.eta * extrapolated / scale;
  }
  return next;
}

}  // namespace adam3
