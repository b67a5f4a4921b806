#pragma once

// Stand-alone AMSGrad-extragradient stepper used as a reference oracle. The
// scaler keeps the running elementwise maximum of the second-moment average,
// which is what the beta3 = 0 configuration of the main method must reduce
// to. Kept deliberately independent of adam3/optimizer.hpp; only the
// elementary operation order matches, so trajectories can be compared for
// exact equality.

#include <cmath>
#include <cstdint>
#include <vector>

#include "adam3/types.hpp"

namespace testsupport {

struct AmsgradExtraState {
  std::vector<double> x;
  std::vector<double> z;
  std::vector<double> m;
  std::vector<double> v;
  std::vector<double> v_hat;
  std::vector<double> d;
  std::uint64_t k = 0;
};

inline AmsgradExtraState amsgrad_extra_init(std::size_t dim) {
  AmsgradExtraState s;
  s.x.assign(dim, 0.0);
  s.z.assign(dim, 0.0);
  s.m.assign(dim, 0.0);
  s.v.assign(dim, 0.0);
  s.v_hat.assign(dim, 0.0);
  s.d.assign(dim, 0.0);
  return s;
}

template <typename GradFn>
AmsgradExtraState amsgrad_extra_step(const AmsgradExtraState& s, const adam3::HyperParams& hp,
                                     GradFn&& grad_at) {
  const std::size_t dim = s.x.size();
  const std::uint64_t k = s.k + 1;
  const double beta1_k = hp.beta1_1 * adam3::pow_u64(hp.kappa, k - 1);

  AmsgradExtraState next = s;
  next.k = k;
  for (std::size_t r = 0; r < dim; ++r) next.z[r] = s.x[r] - hp.eta * s.d[r];
  const std::vector<double> g = grad_at(next.z);
  for (std::size_t r = 0; r < dim; ++r) {
    next.m[r] = beta1_k * s.m[r] + (1.0 - beta1_k) * g[r];
    next.v[r] = hp.beta2 * s.v[r] + (1.0 - hp.beta2) * g[r] * g[r] + hp.eps_guard;
    next.v_hat[r] = std::max(s.v_hat[r], next.v[r]);
    next.d[r] = (1.0 / std::sqrt(next.v_hat[r])) * next.m[r];
    next.x[r] = s.x[r] - hp.eta * next.d[r];
  }
  return next;
}

}  // namespace testsupport
