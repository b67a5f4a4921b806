#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "adam3/diagnostics.hpp"
#include "adam3/errors.hpp"
#include "adam3/games.hpp"
#include "adam3/rng.hpp"
#include "adam3/types.hpp"

namespace adam3 {

/// u_c = (1 - beta3)(1 - beta1_1)(1 - beta2)(1 - gamma) with
/// gamma = beta1_1 / beta2. Requires gamma < 1 strictly so the direction
/// bound sqrt(d / u_c) is finite.
inline double compute_uc(const HyperParams& hp) {
  validate(hp);
  const double gamma = hp.gamma();
  if (!(gamma < 1.0))
    throw infeasible_error("u_c requires gamma = beta1_1 / beta2 < 1 (got gamma = " +
                           std::to_string(gamma) + ")");
  return (1.0 - hp.beta3) * (1.0 - hp.beta1_1) * (1.0 - hp.beta2) * (1.0 - gamma);
}

/// Largest admissible step size, sqrt(G0^3 / (56 L^2 G_inf)).
inline double compute_eta_max(const AssumptionConstants& ac) {
  validate(ac);
  return std::sqrt(ac.g0 * ac.g0 * ac.g0 / (56.0 * ac.l_smooth * ac.l_smooth * ac.g_inf));
}

struct Beta1Cap {
  double c_const = 0.0;      ///< C = (1 + kappa) kappa^2 G0^3 / (168 (1 - kappa) G_inf^3)
  double beta1_1_max = 0.0;  ///< sqrt(C) / (sqrt(C) + 1)
};

inline Beta1Cap compute_beta1_cap(const AssumptionConstants& ac, double kappa) {
  validate(ac);
  if (!(kappa > 0.0 && kappa < 1.0))
    throw infeasible_error("beta1 cap requires kappa in (0,1)");
  const double g0_cu = ac.g0 * ac.g0 * ac.g0;
  const double ginf_cu = ac.g_inf * ac.g_inf * ac.g_inf;
  const double c = (1.0 + kappa) * kappa * kappa * g0_cu / (168.0 * (1.0 - kappa) * ginf_cu);
  const double root = std::sqrt(c);
  return Beta1Cap{c, root / (root + 1.0)};
}

/// Iteration and minibatch sizes that make a run contain an eps-approximate
/// stochastic equilibrium: N >= 3 C1 / eps^2 and m >= 3 C2 sigma^2 / eps^2.
/// C1 and C2 are problem constants supplied by the caller.
inline std::pair<std::uint64_t, std::uint64_t> required_sample_sizes(double c1, double c2,
                                                                 double sigma2, double eps) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw infeasible_error("C1 and C2 must be positive");
  if (!(sigma2 >= 0.0)) throw infeasible_error("sigma2 must be >= 0");
  if (!(eps > 0.0)) throw infeasible_error("eps must be positive");
  const double n_min = std::ceil(3.0 * c1 / (eps * eps));
  const double m_min = std::ceil(3.0 * c2 * sigma2 / (eps * eps));
  return {static_cast<std::uint64_t>(n_min), static_cast<std::uint64_t>(m_min)};
}

/// The B constants from the derivation of the average-gradient bound,
/// provided as optional helpers for sizing experiments; they are not used by
/// any calculator above. Requires kappa in (0,1) and gamma < 1.
struct BConstants {
  double b0 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

inline BConstants compute_b_constants(const HyperParams& hp, const AssumptionConstants& ac,
                                      std::size_t dim) {
  validate(ac);
  if (!(hp.kappa > 0.0 && hp.kappa < 1.0))
    throw infeasible_error("B constants require kappa in (0,1)");
  const double uc = compute_uc(hp);
  const double d = static_cast<double>(dim);
  const double eta2 = hp.eta * hp.eta;
  const double b11 = hp.beta1_1;
  const double kap = hp.kappa;
  const double g0 = ac.g0;
  const double ginf = ac.g_inf;
  const double g0_cu = g0 * g0 * g0;
  const double dd = ac.d_bound;

  BConstants out;
  out.b0 = eta2 * (1.0 - b11) * (1.0 - b11) / (ginf * ginf) -
           84.0 * (1.0 - kap) * b11 * b11 * eta2 * ginf / (g0_cu * kap * kap * (1.0 + kap));
  out.b1 = 6.0 * eta2 * d * b11 * b11 / (uc * (1.0 - kap * kap)) +
           18.0 * dd * dd * d * ginf / g0 +
           168.0 * eta2 * d * b11 * b11 * ginf / (uc * (1.0 - kap * kap) * g0) +
           84.0 * eta2 * d * ginf * ginf * ginf / g0_cu +
           12.0 * hp.eta * dd / g0 *
               (b11 * ginf / (1.0 - kap) * std::sqrt(d / uc) + ginf * ginf * d / g0);
  out.b2 = 6.0 * eta2 / (g0 * g0) + 168.0 * eta2 * ginf / g0_cu;
  return out;
}

enum class CertStatus { holds, fails, inconclusive };

/// Certificate that some point in a list is an eps-approximate first-order
/// equilibrium: the minimum over points of |field|^2 compared against eps^2.
struct SfneCertificate {
  double min_grad_norm_sq = 0.0;
  std::size_t argmin = 0;
  Point argmin_point;
  double eps = 0.0;
  CertStatus status = CertStatus::fails;
  double std_error = 0.0;  ///< of min_grad_norm_sq; zero on the exact path
};

/// Exact-field certificate.
inline SfneCertificate sfne_certificate(const GameSpec& game, const std::vector<Point>& points,
                                        double eps) {
  if (points.empty()) throw config_error("sfne certificate requires at least one point");
  if (!(eps > 0.0)) throw config_error("eps must be positive");
  if (!game.exact_field)
    throw config_error("game has no exact field; use the Monte-Carlo overload");

  SfneCertificate cert;
  cert.eps = eps;
  cert.min_grad_norm_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::vector<double> f = game.exact_field(points[i]);
    double nsq = 0.0;
    for (double v : f) nsq += v * v;
    if (nsq < cert.min_grad_norm_sq) {
      cert.min_grad_norm_sq = nsq;
      cert.argmin = i;
      cert.argmin_point = points[i];
    }
  }
  cert.status = cert.min_grad_norm_sq <= eps * eps ? CertStatus::holds : CertStatus::fails;
  return cert;
}

/// Monte-Carlo certificate for games without an exact field. The field at
/// each point is estimated from `n_draws` single samples; the verdict is
/// three-valued and `inconclusive` when the 4-standard-error band of the
/// minimum straddles eps^2.
inline SfneCertificate sfne_certificate_mc(const GameSpec& game, const std::vector<Point>& points,
                                           double eps, std::size_t n_draws, std::uint64_t seed) {
  if (points.empty()) throw config_error("sfne certificate requires at least one point");
  if (!(eps > 0.0)) throw config_error("eps must be positive");
  if (n_draws < 2) throw config_error("Monte-Carlo certificate requires n_draws >= 2");

  SfneCertificate cert;
  cert.eps = eps;
  cert.min_grad_norm_sq = std::numeric_limits<double>::infinity();
  SplitMix64 rng(splitmix64_mix(seed));
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::vector<double> mean(game.dim, 0.0);
    std::vector<double> m2(game.dim, 0.0);
    for (std::size_t j = 0; j < n_draws; ++j) {
      const std::vector<double> g = game.sample_field(points[i], 1, rng);
      for (std::size_t r = 0; r < game.dim; ++r) {
        const double delta = g[r] - mean[r];
        mean[r] += delta / static_cast<double>(j + 1);
        m2[r] += delta * (g[r] - mean[r]);
      }
    }
    double nsq = 0.0;
    double se_sq = 0.0;
    for (std::size_t r = 0; r < game.dim; ++r) {
      nsq += mean[r] * mean[r];
      const double var_mean = m2[r] / static_cast<double>(n_draws - 1) /
                              static_cast<double>(n_draws);
      se_sq += (2.0 * mean[r]) * (2.0 * mean[r]) * var_mean + 2.0 * var_mean * var_mean;
    }
    if (nsq < cert.min_grad_norm_sq) {
      cert.min_grad_norm_sq = nsq;
      cert.argmin = i;
      cert.argmin_point = points[i];
      cert.std_error = std::sqrt(se_sq);
    }
  }
  const double band = 4.0 * cert.std_error;
  const double target = eps * eps;
  if (cert.min_grad_norm_sq + band <= target)
    cert.status = CertStatus::holds;
  else if (cert.min_grad_norm_sq - band > target)
    cert.status = CertStatus::fails;
  else
    cert.status = CertStatus::inconclusive;
  return cert;
}

}  // namespace adam3
