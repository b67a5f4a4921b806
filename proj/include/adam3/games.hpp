#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "adam3/errors.hpp"
#include "adam3/rng.hpp"
#include "adam3/types.hpp"

namespace adam3 {

/// A stochastic min-max game seen through its gradient field. Fields follow
/// the convention [grad_theta F, -grad_alpha F]: coordinates in [0, split)
/// carry the minimization gradient, coordinates in [split, dim) the negated
/// maximization gradient, so first-order Nash equilibria are zeros of the
/// field and both players descend along it.
struct GameSpec {
  std::size_t dim = 0;
  std::size_t split = 0;

  /// Minibatch-averaged stochastic gradient field at a point.
  std::function<std::vector<double>(const Point&, std::size_t batch, SplitMix64&)> sample_field;

  /// Expectation of sample_field, when available in closed form.
  std::function<std::vector<double>(const Point&)> exact_field;

  /// Objective value F, when available in closed form.
  std::function<double(const Point&)> exact_value;

  std::optional<Point> known_fne;
};

/// Concatenates the theta-gradient with the negated alpha-gradient.
inline std::vector<double> assemble_field(const std::vector<double>& grad_theta,
                                          const std::vector<double>& grad_alpha) {
  std::vector<double> field;
  field.reserve(grad_theta.size() + grad_alpha.size());
  field.insert(field.end(), grad_theta.begin(), grad_theta.end());
  for (double g : grad_alpha) field.push_back(-g);
  return field;
}

/// Parameters of the scalar quadratic game
///   f(theta, alpha; xi) = a_xi (theta - alpha) + (theta^2 - alpha^2) + k theta alpha,
/// where the linear coefficient a_xi is c with probability 1/3 and 1 with
/// probability 2/3. The expected objective has coefficient (c + 2) / 3.
struct QuadraticGameParams {
  double c = 1010.0;        ///< large linear branch, > 1
  double k_coupling = 0.01; ///< bilinear coupling, >= 0
};

inline void validate(const QuadraticGameParams& params) {
  if (!(params.c > 1.0) || !std::isfinite(params.c))
    throw config_error("quadratic game requires c > 1");
  if (!(params.k_coupling >= 0.0) || !std::isfinite(params.k_coupling))
    throw config_error("quadratic game requires k >= 0");
}

/// Closed-form first-order Nash equilibrium of the quadratic game:
///   (theta*, alpha*) = -(c + 2) / (3 k^2 + 12) * (2 - k, 2 + k).
inline Point quadratic_fne(const QuadraticGameParams& params) {
  validate(params);
  const double k = params.k_coupling;
  const double scale = (params.c + 2.0) / (3.0 * k * k + 12.0);
  return Point{{-scale * (2.0 - k), -scale * (2.0 + k)}, 1};
}

inline GameSpec quadratic_game(const QuadraticGameParams& params) {
  validate(params);
  const double c = params.c;
  const double k = params.k_coupling;
  const double a_mean = (c + 2.0) / 3.0;

  GameSpec game;
  game.dim = 2;
  game.split = 1;
  game.exact_field = [a_mean, k](const Point& p) {
    const double t = p.values[0];
    const double a = p.values[1];
    return std::vector<double>{a_mean + 2.0 * t + k * a, a_mean + 2.0 * a - k * t};
  };
  game.exact_value = [a_mean, k](const Point& p) {
    const double t = p.values[0];
    const double a = p.values[1];
    return a_mean * (t - a) + (t * t - a * a) + k * t * a;
  };
  // One uniform variate per sample, branch c when u < 1/3, drawn in index
  // order so traces are reproducible for a fixed substream.
  game.sample_field = [c, k](const Point& p, std::size_t batch, SplitMix64& rng) {
    const double t = p.values[0];
    const double a = p.values[1];
    double sum0 = 0.0;
    double sum1 = 0.0;
    for (std::size_t i = 0; i < batch; ++i) {
      const double a_xi = (rng.next_double() < 1.0 / 3.0) ? c : 1.0;
      sum0 += a_xi + 2.0 * t + k * a;
      sum1 += a_xi + 2.0 * a - k * t;
    }
    const double inv_m = 1.0 / static_cast<double>(batch);
    return std::vector<double>{sum0 * inv_m, sum1 * inv_m};
  };
  game.known_fne = quadratic_fne(params);
  return game;
}

/// F(theta, alpha) = scale * theta * alpha. The field is the rotation
/// (scale * alpha, -scale * theta); its only zero is the origin. The game is
/// deterministic, so sampling ignores the batch size and consumes no
/// randomness.
inline GameSpec bilinear_game(double scale) {
  if (scale == 0.0 || !std::isfinite(scale)) throw config_error("bilinear scale must be nonzero");

  GameSpec game;
  game.dim = 2;
  game.split = 1;
  game.exact_field = [scale](const Point& p) {
    return std::vector<double>{scale * p.values[1], -scale * p.values[0]};
  };
  game.exact_value = [scale](const Point& p) { return scale * p.values[0] * p.values[1]; };
  game.sample_field = [scale](const Point& p, std::size_t, SplitMix64&) {
    return std::vector<double>{scale * p.values[1], -scale * p.values[0]};
  };
  game.known_fne = Point{{0.0, 0.0}, 1};
  return game;
}

}  // namespace adam3
