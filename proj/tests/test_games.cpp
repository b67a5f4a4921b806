#include <catch2/catch.hpp>

#include <cmath>
#include <vector>

#include "adam3/diagnostics.hpp"
#include "adam3/games.hpp"
#include "adam3/rng.hpp"

using namespace adam3;

TEST_CASE("assemble_field concatenates and flips the alpha block") {
  CHECK(assemble_field({1.0}, {2.0}) == std::vector<double>{1.0, -2.0});
  CHECK(assemble_field({0.0, 0.0}, {0.0}) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(assemble_field({3.0}, {-4.0}) == std::vector<double>{3.0, 4.0});
}

TEST_CASE("quadratic game parameters are validated") {
  CHECK_THROWS_AS(quadratic_game({1.0, 0.0}), config_error);
  CHECK_THROWS_AS(quadratic_game({0.5, 1.0}), config_error);
  CHECK_THROWS_AS(quadratic_game({4.0, -0.1}), config_error);
}

TEST_CASE("quadratic equilibrium closed form") {
  SECTION("hand-checked case c=4, k=2") {
    const Point fne = quadratic_fne({4.0, 2.0});
    CHECK(fne.values[0] == Approx(0.0).margin(1e-15));
    CHECK(fne.values[1] == Approx(-1.0).epsilon(1e-15));
    const GameSpec game = quadratic_game({4.0, 2.0});
    const auto field = game.exact_field(fne);
    CHECK(std::abs(field[0]) < 1e-12);
    CHECK(std::abs(field[1]) < 1e-12);
  }
  SECTION("reference parameters c=1010, k=0.01") {
    const Point fne = quadratic_fne({1010.0, 0.01});
    CHECK(fne.values[0] == Approx(-167.8191).epsilon(1e-6));
    CHECK(fne.values[1] == Approx(-169.5058).epsilon(1e-6));
    const GameSpec game = quadratic_game({1010.0, 0.01});
    CHECK(l2_norm(game.exact_field(fne)) < 1e-9);
  }
  SECTION("k=2 zeroes the theta coordinate for any c") {
    for (double c : {1.5, 4.0, 100.0, 1999.0}) {
      CHECK(quadratic_fne({c, 2.0}).values[0] == 0.0);
    }
  }
  SECTION("field vanishes at the equilibrium across random parameters") {
    SplitMix64 rng(42);
    for (int i = 0; i < 100; ++i) {
      const double c = 1.0 + 1999.0 * rng.next_double();
      const double k = 10.0 * rng.next_double();
      const GameSpec game = quadratic_game({c, k});
      CHECK(l2_norm(game.exact_field(quadratic_fne({c, k}))) < 1e-9);
    }
  }
}

TEST_CASE("quadratic sampling matches the closed-form expectation") {
  const QuadraticGameParams params{1010.0, 0.01};
  const GameSpec game = quadratic_game(params);
  const std::vector<Point> points = {Point{{1.0, 1.0}, 1}, Point{{-50.0, 20.0}, 1},
                                     Point{{0.0, 0.0}, 1}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const StatCheck check = unbiasedness_check(game, points[i], 1'000'000, 7 + i);
    INFO("point " << i << " deviation " << check.observed << " tolerance " << check.tolerance);
    CHECK(check.pass);
  }
}

TEST_CASE("quadratic sampling variance is the two-point mixture variance") {
  // Var(a_xi) = (2/9)(c-1)^2 per coordinate; the same draw enters both
  // coordinates, so the vector variance is twice that.
  const double c = 101.0;
  const GameSpec game = quadratic_game({c, 0.5});
  const double expected = 2.0 * (2.0 / 9.0) * (c - 1.0) * (c - 1.0);

  const StatCheck at_origin = variance_check(game, Point{{0.0, 0.0}, 1}, expected, 400'000, 11);
  CHECK(at_origin.pass);
  const StatCheck far_away = variance_check(game, Point{{300.0, -40.0}, 1}, expected, 400'000, 12);
  CHECK(far_away.pass);
}

TEST_CASE("quadratic game satisfies the Minty condition around its equilibrium") {
  const QuadraticGameParams params{4.0, 2.0};
  const GameSpec game = quadratic_game(params);
  const StatCheck check = minty_check(game, quadratic_fne(params), 10'000, 50.0, 3);
  CHECK(check.pass);
}

TEST_CASE("quadratic field is sqrt(4 + k^2)-Lipschitz") {
  const double k = 3.0;
  const GameSpec game = quadratic_game({10.0, k});
  const StatCheck check = smoothness_check(game, std::sqrt(4.0 + k * k), 2000, 100.0, 5);
  CHECK(check.pass);
  // the bound is tight: a slightly smaller constant must fail
  const StatCheck tight = smoothness_check(game, std::sqrt(4.0 + k * k) * 0.999, 2000, 100.0, 5);
  CHECK_FALSE(tight.pass);
}

TEST_CASE("bilinear game field and equilibrium") {
  const GameSpec game = bilinear_game(1.0);
  CHECK(game.exact_field(Point{{0.0, 0.0}, 1}) == std::vector<double>{0.0, 0.0});
  CHECK(game.exact_field(Point{{1.0, 1.0}, 1}) == std::vector<double>{1.0, -1.0});
  CHECK(game.known_fne->values == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(bilinear_game(0.0), config_error);

  SECTION("field is linear in the point and in the scale") {
    SplitMix64 rng(17);
    const GameSpec scaled = bilinear_game(2.5);
    for (int i = 0; i < 50; ++i) {
      const double t = 10.0 * (rng.next_double() - 0.5);
      const double a = 10.0 * (rng.next_double() - 0.5);
      const auto f1 = game.exact_field(Point{{t, a}, 1});
      const auto f2 = game.exact_field(Point{{2.0 * t, 2.0 * a}, 1});
      CHECK(f2[0] == Approx(2.0 * f1[0]));
      CHECK(f2[1] == Approx(2.0 * f1[1]));
      const auto fs = scaled.exact_field(Point{{t, a}, 1});
      CHECK(fs[0] == Approx(2.5 * f1[0]));
      CHECK(fs[1] == Approx(2.5 * f1[1]));
    }
  }

  SECTION("sampling is deterministic and batch-independent") {
    SplitMix64 rng(1);
    const Point p{{0.3, -0.7}, 1};
    const auto s1 = game.sample_field(p, 1, rng);
    const auto s16 = game.sample_field(p, 16, rng);
    CHECK(s1 == s16);
    CHECK(s1 == game.exact_field(p));
  }
}
