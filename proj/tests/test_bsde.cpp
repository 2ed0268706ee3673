#include <doctest.h>

#include <cmath>
#include <random>

#include "twobsde/bsde.hpp"
#include "twobsde/errors.hpp"

using namespace twobsde;

namespace {

const QuadratureRule& quad() {
  static const QuadratureRule q = QuadratureRule::gauss_hermite(16);
  return q;
}

ConjugateGenerator zero_driver() { return ConjugateGenerator::closed_form(GeneratorSpec::g_range(1.0, 4.0)); }

}  // namespace

TEST_SUITE("bsde") {

TEST_CASE("heat equation value of x^2") {
  const auto sol = solve_bsde(zero_driver(), ControlScenario::constant(1.0), Payoff::square(), TimeGrid(100),
                              SpaceGrid(0.0, 8.0, 801), quad());
  CHECK(std::abs(sol.y_series.front().interpolate(0.0) - 1.0) <= 5e-3);
  CHECK(sol.y_series.size() == 101);
  for (std::size_t j = 0; j < 801; ++j) CHECK(sol.y_series.back()[j] == Payoff::square()(sol.y_series.back().grid().x(j)));
}

TEST_CASE("linear reaction in y gives exponential decay") {
  Reaction f = [](double, double, double y, double) { return y; };
  const auto conj = ConjugateGenerator::closed_form(GeneratorSpec::single_vol(1.0, f));
  const auto sol = solve_bsde(conj, ControlScenario::constant(1.0), Payoff::constant(1.0), TimeGrid(1000),
                              SpaceGrid(0.0, 6.0, 61), quad());
  CHECK(std::abs(sol.y_series.front()[30] - std::exp(-1.0)) <= 1e-3);
}

TEST_CASE("constant driver shifts the value") {
  Reaction f = [](double, double, double, double) { return 0.3; };
  const auto conj = ConjugateGenerator::closed_form(GeneratorSpec::single_vol(1.0, f));
  const auto sol = solve_bsde(conj, ControlScenario::constant(1.0), Payoff::linear(1.0), TimeGrid(50),
                              SpaceGrid(0.0, 6.0, 121), quad());
  CHECK(std::abs(sol.y_series.front().interpolate(0.0) + 0.3) <= 1e-6);
}

TEST_CASE("Z of a linear payoff is its slope") {
  const auto sol = solve_bsde(zero_driver(), ControlScenario::constant(2.0), Payoff::linear(1.7), TimeGrid(20),
                              SpaceGrid(0.0, 6.0, 121), quad());
  for (int k = 0; k < 20; ++k)
    for (std::size_t j = 1; j + 1 < 121; ++j) CHECK(std::abs(sol.z_series[k][j] - 1.7) <= 1e-12);
}

TEST_CASE("controls outside D_F and CFL violations are rejected") {
  CHECK_THROWS_AS(solve_bsde(zero_driver(), ControlScenario::constant(5.0), Payoff::square(), TimeGrid(10),
                             SpaceGrid(0.0, 4.0, 41), quad()),
                  DomainError);
  Reaction f = [](double, double, double y, double) { return 50.0 * y; };
  const auto conj = ConjugateGenerator::closed_form(GeneratorSpec::single_vol(1.0, f));
  try {
    solve_bsde(conj, ControlScenario::constant(1.0), Payoff::square(), TimeGrid(10), SpaceGrid(0.0, 4.0, 41), quad());
    FAIL("expected a stability error");
  } catch (const StabilityError& e) {
    CHECK(e.admissible_dt() == doctest::Approx(1.0 / 50.0).epsilon(1e-6));
  }
}

TEST_CASE("a priori bounds") {
  const SpaceGrid sg(0.0, 6.0, 121);
  const auto bounded = solve_bsde(zero_driver(), ControlScenario::constant(1.0), Payoff::callspread(-0.5, 0.5),
                                  TimeGrid(50), sg, quad());
  const auto r1 = apriori_check(bounded, false);
  CHECK(r1.asserted);
  CHECK(r1.passed);
  CHECK(r1.max_abs_y <= 1.0 + 1e-12);

  // sup|g| is infinite for a call, so only the ratio is reported.
  const auto open = apriori_check(
      solve_bsde(zero_driver(), ControlScenario::constant(4.0), Payoff::call(0.0), TimeGrid(50), sg, quad()), false);
  CHECK_FALSE(open.asserted);
  CHECK(open.passed);

  Reaction half = [](double, double, double, double) { return 0.5; };
  const auto conj = ConjugateGenerator::closed_form(GeneratorSpec::single_vol(1.0, half));
  const auto r2 = apriori_check(
      solve_bsde(conj, ControlScenario::constant(1.0), Payoff::constant(0.0), TimeGrid(50), sg, quad()), false);
  CHECK(r2.max_abs_y <= 0.5 + 1e-12);
  CHECK(r2.passed);

  Reaction lin = [](double, double, double y, double) { return y; };
  const auto gr = ConjugateGenerator::closed_form(GeneratorSpec::g_range(1.0, 4.0, lin));
  const auto r3 = apriori_check(
      solve_bsde(gr, ControlScenario::constant(4.0), Payoff::call(0.0), TimeGrid(50), sg, quad()), true);
  CHECK(r3.passed);
  CHECK(r3.ratio <= 3.0);
}

TEST_CASE("comparison at BSDE level") {
  const SpaceGrid sg(0.0, 6.0, 121);
  const auto y1 = solve_bsde(zero_driver(), ControlScenario::constant(2.0), Payoff::put(0.0), TimeGrid(40), sg, quad());
  const auto y2 = solve_bsde(zero_driver(), ControlScenario::constant(2.0), Payoff::abs(), TimeGrid(40), sg, quad());
  for (int k = 0; k <= 40; ++k)
    for (std::size_t j = 0; j < sg.size(); ++j) CHECK(y1.y_series[k][j] <= y2.y_series[k][j] + 1e-12);
}

TEST_CASE("solver is linear in the payoff for a zero driver") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const SpaceGrid sg(0.0, 5.0, 101);
  std::vector<double> xs = sg.nodes(), ya(101), yb(101), yc(101);
  for (int trial = 0; trial < 5; ++trial) {
    const double alpha = nd(rng), beta = nd(rng);
    for (std::size_t j = 0; j < 101; ++j) {
      ya[j] = nd(rng);
      yb[j] = nd(rng);
      yc[j] = alpha * ya[j] + beta * yb[j];
    }
    const auto control = ControlScenario::piecewise({0.5}, {1.0, 3.0});
    const auto sa = solve_bsde(zero_driver(), control, Payoff::table(xs, ya), TimeGrid(20), sg, quad());
    const auto sb = solve_bsde(zero_driver(), control, Payoff::table(xs, yb), TimeGrid(20), sg, quad());
    const auto sc = solve_bsde(zero_driver(), control, Payoff::table(xs, yc), TimeGrid(20), sg, quad());
    for (std::size_t j = 0; j < 101; ++j)
      CHECK(std::abs(sc.y_series[0][j] - alpha * sa.y_series[0][j] - beta * sb.y_series[0][j]) <= 1e-12);
  }
}

TEST_CASE("halving dt changes Y0 by O(dt)") {
  Reaction f = [](double, double, double y, double) { return 0.5 * y; };
  const auto conj = ConjugateGenerator::closed_form(GeneratorSpec::single_vol(1.0, f));
  // dx shrinks with dt: interpolation adds variance of order N dx^2.
  auto y0 = [&](int n) {
    return solve_bsde(conj, ControlScenario::constant(1.0), Payoff("cos", [](double x) { return std::cos(x); }),
                      TimeGrid(n), SpaceGrid(0.0, 8.0, 64 * n + 1), quad())
        .y_series.front()
        .interpolate(0.0);
  };
  const double a = y0(25), b = y0(50), c = y0(100);
  const double order = std::log2(std::abs(a - b) / std::abs(b - c));
  CHECK(order >= 0.8);
}

TEST_CASE("feedback and surface paths agree") {
  const SpaceGrid sg(0.0, 5.0, 51);
  std::vector<std::vector<double>> table(10, std::vector<double>(51, 2.5));
  const auto a = solve_bsde(zero_driver(), ControlScenario::feedback(table), Payoff::call(0.0), TimeGrid(10), sg, quad());
  const auto b = solve_bsde(zero_driver(), ControlScenario::constant(2.5), Payoff::call(0.0), TimeGrid(10), sg, quad());
  for (int k = 0; k <= 10; ++k)
    for (std::size_t j = 0; j < 51; ++j) CHECK(a.y_series[k][j] == b.y_series[k][j]);
}

}
