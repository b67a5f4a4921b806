#include <catch2/catch.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "adam3/diagnostics.hpp"
#include "adam3/games.hpp"
#include "adam3/runner.hpp"

using namespace adam3;

TEST_CASE("relative error") {
  const Point z_star{{0.0, 5.0}, 1};
  CHECK(relative_error(z_star, z_star) == 0.0);
  CHECK(relative_error(Point{{0.0, 10.0}, 1}, z_star) == Approx(1.0));
  CHECK(relative_error(Point{{3.0, 4.0}, 1}, z_star) == Approx(0.632456).epsilon(1e-6));
  CHECK_THROWS_AS(relative_error(z_star, Point{{0.0, 0.0}, 1}), config_error);
}

TEST_CASE("running average of squared gradient norms") {
  CHECK(running_avg_grad_norm({4.0}) == std::vector<double>{4.0});
  CHECK(running_avg_grad_norm({4.0, 0.0}) == std::vector<double>{4.0, 2.0});
  const auto constant = running_avg_grad_norm({3.0, 3.0, 3.0, 3.0});
  for (double v : constant) CHECK(v == Approx(3.0));
  CHECK_THROWS_AS(running_avg_grad_norm({}), config_error);

  SECTION("the last element is the order-independent mean") {
    std::vector<double> values{5.0, 0.5, 2.25, 9.0, 1.0, 0.0, 7.5};
    const double mean = running_avg_grad_norm(values).back();
    std::reverse(values.begin(), values.end());
    CHECK(running_avg_grad_norm(values).back() == Approx(mean).epsilon(1e-14));
  }
}

namespace {

// F = theta^4 - alpha^4 + theta * alpha: nonzero third derivatives, so the
// central-difference error has a clean h^2 leading term.
GameSpec quartic_game() {
  GameSpec game;
  game.dim = 2;
  game.split = 1;
  game.exact_value = [](const Point& p) {
    const double t = p.values[0];
    const double a = p.values[1];
    return t * t * t * t - a * a * a * a + t * a;
  };
  game.exact_field = [](const Point& p) {
    const double t = p.values[0];
    const double a = p.values[1];
    return std::vector<double>{4.0 * t * t * t + a, 4.0 * a * a * a - t};
  };
  game.sample_field = [&game](const Point& p, std::size_t, SplitMix64&) {
    const double t = p.values[0];
    const double a = p.values[1];
    return std::vector<double>{4.0 * t * t * t + a, 4.0 * a * a * a - t};
  };
  return game;
}

}  // namespace

TEST_CASE("finite differences validate the closed-form fields") {
  SplitMix64 rng(6);
  SECTION("quadratic game") {
    const GameSpec game = quadratic_game({1010.0, 0.01});
    CHECK(finite_diff_check(game, Point{{1.0, 1.0}, 1}, 1e-5) < 1e-6);
    for (int i = 0; i < 10; ++i) {
      Point p{{20.0 * (rng.next_double() - 0.5), 20.0 * (rng.next_double() - 0.5)}, 1};
      CHECK(finite_diff_check(game, p, 1e-5) < 1e-6);
    }
  }
  SECTION("bilinear game is exact up to rounding") {
    const GameSpec game = bilinear_game(2.0);
    for (int i = 0; i < 10; ++i) {
      Point p{{4.0 * (rng.next_double() - 0.5), 4.0 * (rng.next_double() - 0.5)}, 1};
      CHECK(finite_diff_check(game, p, 1e-5) < 1e-9);
    }
  }
  SECTION("deviation ignores constant shifts of the objective") {
    const GameSpec game = quadratic_game({4.0, 2.0});
    GameSpec shifted = game;
    auto base = game.exact_value;
    shifted.exact_value = [base](const Point& p) { return base(p) + 1234.5; };
    const Point p{{0.7, -0.3}, 1};
    CHECK(finite_diff_check(shifted, p, 1e-4) ==
          Approx(finite_diff_check(game, p, 1e-4)).margin(1e-8));
  }
  SECTION("second-order convergence on a quartic") {
    const GameSpec game = quartic_game();
    const Point p{{1.3, -0.7}, 1};
    const double d2 = finite_diff_check(game, p, 1e-2);
    const double d4 = finite_diff_check(game, p, 1e-4);
    const double slope = std::log10(d2 / d4) / 2.0;
    CHECK(slope == Approx(2.0).margin(0.3));
  }
  SECTION("requires the closed forms") {
    GameSpec game = quadratic_game({4.0, 2.0});
    game.exact_value = nullptr;
    CHECK_THROWS_AS(finite_diff_check(game, Point{{0.0, 0.0}, 1}, 1e-5), config_error);
  }
}

TEST_CASE("trajectory audit on a recorded run") {
  HyperParams hp;
  hp.eta = 0.02;
  hp.beta1_1 = 0.45;
  hp.kappa = 0.99;
  hp.beta2 = 0.9;
  hp.beta3 = 0.1;
  hp.eps_guard = 0.0;
  hp.v0_init = 0.0;
  hp.n_iters = 2000;
  const GameSpec game = quadratic_game({4.0, 1.0});
  RunOptions options;
  options.record_states = true;
  const RunResult run = run_optimizer(game, hp, Method::adam3, 17, 100, options);
  REQUIRE(run.states.size() == hp.n_iters + 1);

  AssumptionConstants ac;
  ac.g_inf = run.audit.g_inf_emp;
  ac.g0 = std::min(1.0, ac.g_inf);

  SECTION("all invariants pass with the empirical gradient bound") {
    const AuditReport report = audit_trace(run.trace, run.states, hp, ac);
    CHECK(report.all_ok());
    CHECK(report.zero_init_regime);
    CHECK(report.find("momentum_bound")->status == CheckStatus::pass);
    CHECK(report.find("direction_bound")->status == CheckStatus::pass);
    CHECK(report.find("vt_monotone")->status == CheckStatus::pass);
    CHECK(report.find("vt_floor")->status == CheckStatus::pass);
    CHECK(report.find("vt_telescoping")->status == CheckStatus::pass);
    CHECK(report.find("extragradient")->status == CheckStatus::pass);
    CHECK(report.find("iterate_bound")->status == CheckStatus::not_applicable);
  }

  SECTION("the direction bound is not applicable when gamma > 1") {
    HyperParams top_heavy = hp;
    top_heavy.beta1_1 = 0.95;
    const AuditReport report = audit_trace(run.trace, run.states, top_heavy, ac);
    CHECK(report.find("direction_bound")->status == CheckStatus::not_applicable);
  }

  SECTION("an empty trace audits vacuously") {
    const AuditReport report = audit_trace({}, run.states, hp, ac);
    CHECK(report.find("extragradient")->status == CheckStatus::pass);
    CHECK(report.all_ok());
  }

  SECTION("trace records beyond the state history are rejected") {
    std::vector<TraceRecord> bad = run.trace;
    bad.back().k = hp.n_iters + 5;
    CHECK_THROWS_AS(audit_trace(bad, run.states, hp, ac), config_error);
  }

  SECTION("iterate-norm check reports the first violation") {
    AssumptionConstants tight = ac;
    tight.d_bound = 1e-3;  // |x_k| exceeds D/2 almost immediately
    const AuditReport report = audit_trace(run.trace, run.states, hp, tight);
    const InvariantResult* r = report.find("iterate_bound");
    REQUIRE(r != nullptr);
    CHECK(r->status == CheckStatus::fail);
    CHECK(r->first_violation >= 1);

    AssumptionConstants loose = ac;
    loose.d_bound = 1e6;
    CHECK(audit_trace(run.trace, run.states, hp, loose).find("iterate_bound")->status ==
          CheckStatus::pass);
  }

  SECTION("tampered states are caught") {
    std::vector<OptimizerState> tampered = run.states;
    tampered[500].v_tilde[0] *= 0.5;  // breaks monotonicity at 500 or the floor at 501
    const AuditReport report = audit_trace(run.trace, tampered, hp, ac);
    CHECK_FALSE(report.all_ok());
  }

  SECTION("scaler floor initialization flips the reported regime") {
    HyperParams floored = hp;
    floored.v0_init = ac.g0 * ac.g0;
    const RunResult run2 = run_optimizer(game, floored, Method::adam3, 17, 100, options);
    const AuditReport report = audit_trace(run2.trace, run2.states, floored, ac);
    CHECK_FALSE(report.zero_init_regime);
    CHECK(report.all_ok());
  }
}
