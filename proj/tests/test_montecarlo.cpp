#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "twobsde/bsde.hpp"
#include "twobsde/errors.hpp"
#include "twobsde/montecarlo.hpp"
#include "twobsde/random.hpp"

using namespace twobsde;

TEST_SUITE("montecarlo") {

TEST_CASE("inverse normal cdf") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(inverse_normal_cdf(1e-10) == doctest::Approx(-6.361340902404056).epsilon(1e-12));
  for (double p : {1e-6, 0.01, 0.3, 0.77, 0.999}) {
    const double x = inverse_normal_cdf(p);
    CHECK(0.5 * std::erfc(-x / std::numbers::sqrt2) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("Philox is counter based") {
  const Philox4x32 a(42), b(42), c(43);
  const Philox4x32::Counter ctr{7, 3, 0, 0}, next{7, 4, 0, 0};
  CHECK(a(ctr) == b(ctr));
  CHECK(a(ctr) != a(next));
  CHECK(a(ctr) != c(ctr));
  // Known-answer vector for Philox4x32-10 with zero key and counter.
  const Philox4x32 zero(0);
  const auto out = zero({0, 0, 0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);
}

TEST_CASE("terminal value estimates") {
  const auto lin = mc_terminal_value(Payoff::linear(1.0), 3.0, 20000, 1);
  CHECK(std::abs(lin.mean) <= 3.0 * lin.std_error + 1e-12);
  const auto call = mc_terminal_value(Payoff::call(0.0), 4.0, 200000, 2);
  CHECK(std::abs(call.mean - 2.0 / std::sqrt(2.0 * std::numbers::pi)) <= 3.0 * call.std_error);
  const auto sq = mc_terminal_value(Payoff::square(), 2.0, 200000, 3);
  CHECK(std::abs(sq.mean - 2.0) <= 3.0 * sq.std_error);
  CHECK_THROWS_AS(mc_terminal_value(Payoff::square(), 0.0, 10, 1), DomainError);
}

TEST_CASE("Monte Carlo agrees with the lattice BSDE") {
  const auto conj = ConjugateGenerator::closed_form(GeneratorSpec::single_vol(2.0));
  const auto g = Payoff::butterfly(0.5, 1.0);
  const auto sol = solve_bsde(conj, ControlScenario::constant(2.0), g, TimeGrid(100), SpaceGrid(0.0, 9.0, 901),
                              QuadratureRule::gauss_hermite(16));
  const auto mc = mc_terminal_value(g, 2.0, 200000, 9);
  CHECK(std::abs(sol.y_series[0].interpolate(0.0) - mc.mean) <= 3.0 * mc.std_error + 5e-3);
}

TEST_CASE("counterexample at small scale") {
  CounterexampleConfig cfg;
  cfg.n_paths = 20000;
  cfg.n_steps = 1000;
  cfg.t_stop = 0.95;
  const auto r = simulate_counterexample(cfg, {0.0, 0.25, 0.5}, 2);
  CHECK(r.checkpoints[0].mean_R == 1.0);
  CHECK(r.checkpoints[0].target == 1.0);
  for (const auto& c : r.checkpoints) {
    if (c.t > 0.0) CHECK(c.stderr_R > 0.0);
    CHECK(c.within_tolerance);
  }
}

TEST_CASE("counterexample report is reproducible and thread independent") {
  CounterexampleConfig cfg;
  cfg.n_paths = 4000;
  cfg.n_steps = 400;
  cfg.t_stop = 0.9;
  cfg.n_batches = 8;
  std::ostringstream a, b;
  write_csv(a, simulate_counterexample(cfg, {0.25, 0.5}, 1));
  write_csv(b, simulate_counterexample(cfg, {0.25, 0.5}, 4));
  CHECK(a.str() == b.str());
  cfg.seed += 1;
  std::ostringstream c;
  write_csv(c, simulate_counterexample(cfg, {0.25, 0.5}, 1));
  CHECK(a.str() != c.str());
}

TEST_CASE("dynamics residual shrinks under refinement") {
  CounterexampleConfig cfg;
  cfg.n_paths = 4000;
  cfg.t_stop = 0.9;
  cfg.n_steps = 400;
  const double coarse = simulate_counterexample(cfg, {0.5}, 2).dynamics_residual;
  cfg.n_steps = 1600;
  const double fine = simulate_counterexample(cfg, {0.5}, 2).dynamics_residual;
  // O(sqrt(dt)): a fourfold refinement roughly halves the residual.
  CHECK(fine < coarse);
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("counterexample preconditions") {
  CounterexampleConfig cfg;
  cfg.c = 1.0;
  CHECK_THROWS_AS(simulate_counterexample(cfg, {0.5}), DomainError);
  cfg.c = 2.0;
  cfg.t_stop = 1.0;
  CHECK_THROWS_AS(simulate_counterexample(cfg, {0.5}), DomainError);
  cfg.t_stop = 0.999;
  cfg.n_steps = 100;
  CHECK_THROWS_AS(simulate_counterexample(cfg, {0.5}), StabilityError);
  cfg.t_stop = 0.9;
  CHECK_THROWS_AS(simulate_counterexample(cfg, {0.95}), DomainError);
}

}
