#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "adam3/baselines.hpp"
#include "adam3/games.hpp"
#include "adam3/runner.hpp"

using namespace adam3;

TEST_CASE("simultaneous Adam fixed point and hand oracle") {
  HyperParams hp;
  hp.eta = 0.1;
  hp.beta1_1 = 0.9;
  hp.beta2 = 0.999;
  hp.eps_guard = 0.0;

  SECTION("zero gradients leave x unchanged") {
    HyperParams guarded = hp;
    guarded.eps_guard = 1e-8;
    SAdamState s = sadam_init(2, 1, guarded);
    auto zero = [](const Point&) { return std::vector<double>{0.0, 0.0}; };
    for (int i = 0; i < 50; ++i) s = sadam_step(s, guarded, zero);
    CHECK(s.x.values == std::vector<double>{0.0, 0.0});
  }

  SECTION("one bias-corrected step on the bilinear field from (1,1)") {
    const GameSpec game = bilinear_game(1.0);
    SAdamState s = sadam_init(2, 1, hp);
    s.x.values = {1.0, 1.0};
    const SAdamState next =
        sadam_step(s, hp, [&](const Point& p) { return game.exact_field(p); });
    // m_hat = g = (1,-1), v_hat = (1,1)
    CHECK(next.m_vec[0] / (1.0 - 0.9) == Approx(1.0).epsilon(1e-12));
    CHECK(next.v_vec[0] / (1.0 - 0.999) == Approx(1.0).epsilon(1e-9));
    CHECK(next.x.values[0] == Approx(0.9).epsilon(1e-12));
    CHECK(next.x.values[1] == Approx(1.1).epsilon(1e-12));
  }
}

TEST_CASE("simultaneous Adam misses the quadratic equilibrium that adam3 finds") {
  // Reference synthetic setup; the iteration budget is sized so the
  // converging method reaches its plateau. Thresholds frozen from pilots.
  const double c = 1010.0;
  HyperParams hp;
  hp.eta = 1e-2;
  hp.beta1_1 = 0.0;
  hp.kappa = 1.0;
  hp.beta2 = 1.0 / (1.0 + c * c);
  hp.beta3 = 0.1;
  hp.batch_m = 1;
  hp.n_iters = 250'000;
  hp.eps_guard = 1e-8;

  const GameSpec game = quadratic_game({c, 0.01});
  const RunResult sadam = run_optimizer(game, hp, Method::sadam, 1, hp.n_iters);
  const RunResult adam = run_optimizer(game, hp, Method::adam3, 1, hp.n_iters);

  CHECK(sadam.terminal_e > 0.5);
  CHECK(adam.terminal_e < 0.05);
}

TEST_CASE("optimistic AdaGrad steps") {
  HyperParams hp;
  hp.eta = 0.1;
  hp.eps_guard = 0.0;
  const GameSpec game = bilinear_game(1.0);

  SECTION("first step uses twice the gradient") {
    OAdagradState s = oadagrad_init(2, 1, hp);
    s.x.values = {1.0, 1.0};
    const OAdagradState next =
        oadagrad_step(s, hp, [&](const Point& p) { return game.exact_field(p); });
    // x1 = (1,1) - 0.2 * (1,-1) / (1,1)
    CHECK(next.x.values[0] == Approx(0.8).epsilon(1e-12));
    CHECK(next.x.values[1] == Approx(1.2).epsilon(1e-12));
    CHECK(next.accum == std::vector<double>{1.0, 1.0});
    CHECK(next.g_prev == std::vector<double>{1.0, -1.0});
  }

  SECTION("zero gradients leave x unchanged") {
    HyperParams guarded = hp;
    guarded.eps_guard = 1e-8;
    OAdagradState s = oadagrad_init(2, 1, guarded);
    auto zero = [](const Point&) { return std::vector<double>{0.0, 0.0}; };
    for (int i = 0; i < 50; ++i) s = oadagrad_step(s, guarded, zero);
    CHECK(s.x.values == std::vector<double>{0.0, 0.0});
  }

  SECTION("the squared-gradient accumulator never decreases") {
    HyperParams guarded = hp;
    guarded.eps_guard = 1e-8;
    const GameSpec noisy = quadratic_game({5.0, 1.0});
    OAdagradState s = oadagrad_init(2, 1, guarded);
    for (std::uint64_t k = 1; k <= 500; ++k) {
      SplitMix64 rng = iteration_stream(3, k);
      const OAdagradState next =
          oadagrad_step(s, guarded, [&](const Point& p) { return noisy.sample_field(p, 1, rng); });
      REQUIRE(next.accum[0] >= s.accum[0]);
      REQUIRE(next.accum[1] >= s.accum[1]);
      s = next;
    }
  }
}

TEST_CASE("memoryless S-Adam descends along the field") {
  // With beta1 = beta2 = 0 and a large guard the update direction is a
  // damped copy of the field, so its inner product with the field is
  // nonpositive (sign convention: the update subtracts).
  HyperParams hp;
  hp.eta = 0.1;
  hp.beta1_1 = 0.0;
  hp.beta2 = 0.0;
  hp.eps_guard = 1e3;

  SplitMix64 rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    SAdamState s = sadam_init(2, 1, hp);
    s.x.values = {rng.next_double(), rng.next_double()};
    const std::vector<double> field{4.0 * (rng.next_double() - 0.5),
                                    4.0 * (rng.next_double() - 0.5)};
    const SAdamState next = sadam_step(s, hp, [&](const Point&) { return field; });
    double inner = 0.0;
    for (std::size_t r = 0; r < 2; ++r) inner += (next.x.values[r] - s.x.values[r]) * field[r];
    REQUIRE(inner <= 0.0);
  }
}

TEST_CASE("baseline runs are deterministic for a fixed seed") {
  HyperParams hp;
  hp.eta = 0.05;
  hp.beta1_1 = 0.9;
  hp.beta2 = 0.999;
  hp.n_iters = 500;
  const GameSpec game = quadratic_game({20.0, 0.5});

  for (Method method : {Method::sadam, Method::oadagrad}) {
    const RunResult a = run_optimizer(game, hp, method, 42, 100);
    const RunResult b = run_optimizer(game, hp, method, 42, 100);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      REQUIRE(a.trace[i].z.values == b.trace[i].z.values);
      REQUIRE(a.trace[i].r_k == b.trace[i].r_k);
    }
  }
}
