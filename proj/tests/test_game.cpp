#include <cmath>
#include <random>

#include "doctest.h"
#include "trustdyn/game.hpp"

using namespace trustdyn;
using U = UserStrategy;
using Cr = CreatorStrategy;

namespace {

GameParams with_eps(double eps) {
  GameParams p;
  p.eps = eps;
  return p;
}

GameParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  GameParams p;
  p.b_u = 0.1 + 10 * unit(rng);
  p.b_c = 0.1 + 10 * unit(rng);
  p.c = 3 * unit(rng);
  p.v = 3 * unit(rng);
  p.mu = -2 + 3 * unit(rng);
  p.eps = 3 * unit(rng);
  p.p_T = unit(rng);
  p.p_D = unit(rng);
  p.r = 1 + int(rng() % 30);
  p.theta_T = int(rng() % (p.r + 1));
  p.theta_D = int(rng() % (p.r + 1));
  return p;
}

PopulationMix random_mix(std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  double w[5], s = 0;
  for (double& q : w) s += (q = e(rng));
  return PopulationMix::from_xyzw(w[0] / s, w[1] / s, w[2] / s, w[3] / s,
                                  std::uniform_real_distribution<double>(0, 1)(rng));
}

}  // namespace

TEST_CASE("payoff table cells") {
  const auto t = build_payoff_table(GameParams{});
  CHECK(t.user(U::kAllA, Cr::kC) == 4.0);
  CHECK(t.creator(U::kAllA, Cr::kC) == 3.5);
  CHECK(t.user(U::kAllN, Cr::kC) == 0.0);
  CHECK(t.user(U::kAllN, Cr::kD) == 0.0);
  CHECK(t.creator(U::kAllN, Cr::kC) == -0.5);
  CHECK(t.creator(U::kAllN, Cr::kD) == 0.0);

  const auto t1 = build_payoff_table(with_eps(1.0));
  CHECK(t1.user(U::kTUA, Cr::kC) == doctest::Approx(3.525).epsilon(1e-15));
  CHECK(t1.user(U::kTFT, Cr::kD) == doctest::Approx(-1.08).epsilon(1e-15));
  // conditional users expose a defector for one round only
  for (auto u : {U::kTFT, U::kTUA, U::kDtG})
    CHECK(t1.creator(u, Cr::kD) == doctest::Approx((4.0 - 0.1) / 10));
}

TEST_CASE("parameter validation") {
  GameParams p;
  p.mu = 1.5;
  CHECK_THROWS_AS(build_payoff_table(p), InvalidParams);
  p = {};
  p.theta_T = 11;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = {};
  p.r = 0;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = {};
  p.eps = -0.1;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = {};
  p.p_D = 1.01;
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  p = {};
  p.v = std::nan("");
  CHECK_THROWS_AS(p.validate(), InvalidParams);
  CHECK_NOTHROW(GameParams{}.validate());
}

TEST_CASE("fitness vectors") {
  const auto t = build_payoff_table(GameParams{});
  SUBCASE("alpha = 1 and 0 select a column") {
    const auto f1 = user_fitness(PopulationMix::from_xyzw(0.2, 0.2, 0.2, 0.2, 1.0), t);
    const auto f0 = user_fitness(PopulationMix::from_xyzw(0.2, 0.2, 0.2, 0.2, 0.0), t);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(f1[i] == t.user_payoff[i][0]);
      CHECK(f0[i] == t.user_payoff[i][1]);
    }
  }
  SUBCASE("AllA at alpha 1/2") {
    const auto f = user_fitness(PopulationMix::from_xyzw(0.2, 0.2, 0.2, 0.2, 0.5), t);
    CHECK(f[0] == doctest::Approx(1.6).epsilon(1e-15));
  }
  SUBCASE("creator fitness") {
    auto f = creator_fitness(PopulationMix::pure(U::kAllN, 0.5), t);
    CHECK(f[0] == -0.5);
    CHECK(f[1] == 0.0);
    f = creator_fitness(PopulationMix::pure(U::kAllA, 0.5), t);
    CHECK(f[0] == 3.5);
    CHECK(f[1] == doctest::Approx(3.9));
    f = creator_fitness(PopulationMix::from_xyzw(0.2, 0.2, 0.2, 0.2, 0.5), t);
    CHECK(f[1] == doctest::Approx(1.014).epsilon(1e-14));
    // against C the fitness is (b_c - c) - y b_c
    CHECK(f[0] == doctest::Approx(3.5 - 0.2 * 4));
  }
}

TEST_CASE("closed-form differences: worked values") {
  GameParams p;
  CHECK(fitness_difference_closed_form(U::kAllA, U::kAllN, PopulationMix::pure(U::kAllA, 1), p) ==
        doctest::Approx(p.b_u));
  p.eps = 1.0;
  CHECK(fitness_difference_closed_form(U::kTFT, U::kTUA, PopulationMix::pure(U::kTFT, 1), p) ==
        doctest::Approx(0.475).epsilon(1e-14));
  CHECK(fitness_difference_closed_form(Cr::kC, Cr::kD, PopulationMix::pure(U::kAllA, 0.3),
                                       GameParams{}) == doctest::Approx(-0.4).epsilon(1e-14));
  CHECK(fitness_difference_closed_form(U::kDtG, U::kDtG, PopulationMix::pure(U::kAllA, 0.3), p) ==
        0.0);
}

TEST_CASE("closed-form differences agree with the payoff matrix on random draws") {
  std::mt19937_64 rng(20240611);
  double worst = 0.0;
  for (int draw = 0; draw < 1000; ++draw) {
    const auto p = random_params(rng);
    const auto mix = random_mix(rng);
    const auto t = build_payoff_table(p);
    const auto fu = user_fitness(mix, t);
    const auto fc = creator_fitness(mix, t);
    for (std::size_t a = 0; a < 5; ++a) {
      for (std::size_t b = 0; b < 5; ++b) {
        if (a == b) continue;
        const double closed =
            fitness_difference_closed_form(kAllUserStrategies[a], kAllUserStrategies[b], mix, p);
        double matrix = fu[a] - fu[b];
        // The printed TFT/TUA form drops the -eps of TFT against C.
        if (a == 2 && b == 3) matrix += mix.alpha() * p.eps;
        if (a == 3 && b == 2) matrix -= mix.alpha() * p.eps;
        const double scale = std::max({1.0, std::abs(fu[a]), std::abs(fu[b])});
        worst = std::max(worst, std::abs(closed - matrix) / scale);
      }
    }
    const double closed_c = fitness_difference_closed_form(Cr::kC, Cr::kD, mix, p);
    const double scale = std::max({1.0, std::abs(fc[0]), std::abs(fc[1])});
    worst = std::max(worst, std::abs(closed_c - (fc[0] - fc[1])) / scale);
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("fitness is bilinear in alpha and the user mix") {
  // Independent evaluation straight from the per-round averages.
  GameParams p;
  p.eps = 0.7;
  const double x = 0.1, y = 0.3, z = 0.25, w = 0.15, a = 0.35;
  const auto mix = PopulationMix::from_xyzw(x, y, z, w, a);
  const auto fu = user_fitness(mix, build_payoff_table(p));
  const double mt = (3 * 0.7 + 7 * 0.25 * 0.7) / 10;
  CHECK(fu[2] == doctest::Approx(a * (4 - 0.7) + (1 - a) * (-0.8 / 10 - 0.7)));
  CHECK(fu[3] == doctest::Approx(a * (4 - mt) + (1 - a) * (-0.8 / 10 - 0.7)));
  CHECK(fu[4] == doctest::Approx(a * (4 - 0.7) + (1 - a) * (-0.8 / 10 - mt)));
  const auto fc = creator_fitness(mix, build_payoff_table(p));
  const double dtg = 1 - x - y - z - w;
  CHECK(fc[1] == doctest::Approx(x * 3.9 + (z + w + dtg) * 0.39));
}

TEST_CASE("population mix validation") {
  CHECK_THROWS_AS(PopulationMix::from_xyzw(0.5, 0.6, 0, 0, 0.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PopulationMix::from_xyzw(0.2, 0.2, 0.2, 0.2, 1.2).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(PopulationMix::pure(U::kDtG, 0.0).validate());
}

TEST_CASE("per-state adoption and cooperation") {
  GameParams p;
  auto m = per_state_metrics(U::kAllA, Cr::kD, p);
  CHECK(m.adoption_rate == 1.0);
  CHECK(m.coop_flag == 0);
  m = per_state_metrics(U::kTFT, Cr::kD, p);
  CHECK(m.adoption_rate == doctest::Approx(0.1));
  m = per_state_metrics(U::kDtG, Cr::kC, p);
  CHECK(m.adoption_rate == 1.0);
  CHECK(m.coop_flag == 1);
  CHECK(per_state_metrics(U::kAllN, Cr::kC, p).adoption_rate == 0.0);
}

TEST_CASE("strategy names round-trip") {
  for (auto s : kAllUserStrategies) CHECK(parse_user_strategy(name(s)) == s);
  CHECK_THROWS(parse_user_strategy("Grim"));
}
