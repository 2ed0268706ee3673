#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "twobsde/errors.hpp"
#include "twobsde/generators.hpp"

using namespace twobsde;

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }
double neg(double v) { return v < 0.0 ? -v : 0.0; }

// Gamma-band conjugate written out by hand: sup over [lo, hi] of a g/2 - g/2.
double band_conjugate(double lo, double hi, double a) {
  return 0.5 * (hi * pos(a - 1.0) - lo * neg(a - 1.0));
}

}  // namespace

TEST_SUITE("generators") {

TEST_CASE("H evaluation on the three built-ins") {
  CHECK(eval_H(GeneratorSpec::single_vol(2.0), 0, 0, 0, 0, 3.0).value() == doctest::Approx(3.0));
  CHECK(eval_H(GeneratorSpec::gamma_band(-1.0, 2.0), 0, 0, 0, 0, 3.0).is_unbounded());
  CHECK(eval_H(GeneratorSpec::gamma_band(-1.0, 2.0), 0, 0, 0, 0, 2.0).value() == doctest::Approx(1.0));
  for (const auto& spec : {GeneratorSpec::single_vol(1.3), GeneratorSpec::g_range(1.0, 4.0),
                           GeneratorSpec::gamma_band(-1.0, 2.0)})
    CHECK(eval_H(spec, 0.3, 0.1, 0.2, -0.4, 0.0).value() == 0.0);
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(GeneratorSpec::single_vol(0.0), DomainError);
  CHECK_THROWS_AS(GeneratorSpec::g_range(4.0, 1.0), DomainError);
  CHECK_THROWS_AS(GeneratorSpec::gamma_band(1.0, 2.0), DomainError);
  CHECK_THROWS_AS(GeneratorSpec::gamma_band(-1.0, -0.5), DomainError);
}

TEST_CASE("closed-form conjugates") {
  CHECK(conjugate_closed(GeneratorSpec::gamma_band(-1, 2), 0, 0, 0, 0, 3.0).value() ==
        doctest::Approx(2.0));
  CHECK(conjugate_closed(GeneratorSpec::g_range(1, 4), 0, 0, 0, 0, 2.0).value() == 0.0);
  CHECK(conjugate_closed(GeneratorSpec::g_range(1, 4), 0, 0, 0, 0, 4.5).is_unbounded());
  CHECK(conjugate_closed(GeneratorSpec::single_vol(1), 0, 0, 0, 0, 1.0).value() == 0.0);
  CHECK(conjugate_closed(GeneratorSpec::single_vol(1), 0, 0, 0, 0, 1.5).is_unbounded());
  for (double a : {0.1, 0.5, 1.0, 2.5, 5.0})
    CHECK(conjugate_closed(GeneratorSpec::gamma_band(-1, 2), 0, 0, 0, 0, a).value() ==
          doctest::Approx(band_conjugate(-1, 2, a)).epsilon(1e-14));
}

TEST_CASE("reaction enters F with a plus sign") {
  Reaction f = [](double, double, double y, double z) { return 2.0 * y + z; };
  const auto spec = GeneratorSpec::g_range(1, 4, f);
  CHECK(conjugate_closed(spec, 0, 0, 0.5, 0.25, 2.0).value() == doctest::Approx(1.25));
  CHECK(eval_H(spec, 0, 0, 0.5, 0.25, 0.0).value() == doctest::Approx(-1.25));
}

TEST_CASE("numeric conjugate") {
  const auto g = linspace(-10.0, 10.0, 2001);
  CHECK(conjugate_numeric(GeneratorSpec::single_vol(1), 0, 0, 0, 0, 1.0, g).value() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(conjugate_numeric(GeneratorSpec::single_vol(2), 0, 0, 0, 0, 1.0, g).is_unbounded());
  const auto band = linspace(-1.0, 2.0, 30001);
  CHECK(std::abs(conjugate_numeric(GeneratorSpec::gamma_band(-1, 2), 0, 0, 0, 0, 3.0, band).value() -
                 2.0) <= 1e-9);
}

TEST_CASE("numeric agrees with closed form on all built-ins") {
  const auto wide = linspace(-20.0, 20.0, 40001);
  const auto band = linspace(-1.0, 2.0, 3001);
  for (double a : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double tol = 2e-3 * a + 1e-9;
    for (const auto& spec : {GeneratorSpec::single_vol(1.0), GeneratorSpec::g_range(0.5, 2.0)}) {
      const ExtReal c = conjugate_closed(spec, 0, 0, 0, 0, a);
      const ExtReal n = conjugate_numeric(spec, 0, 0, 0, 0, a, wide);
      CHECK(c.is_unbounded() == n.is_unbounded());
      if (c.is_finite() && n.is_finite()) CHECK(std::abs(c.value() - n.value()) <= tol);
    }
    const auto spec = GeneratorSpec::gamma_band(-1.0, 2.0);
    CHECK(std::abs(conjugate_closed(spec, 0, 0, 0, 0, a).value() -
                   conjugate_numeric(spec, 0, 0, 0, 0, a, band).value()) <= tol);
  }
}

TEST_CASE("domain of F") {
  const auto d1 = domain_DF(ConjugateGenerator::closed_form(GeneratorSpec::single_vol(2)));
  CHECK(d1.is_point());
  CHECK(d1.lo == 2.0);
  const auto d2 = domain_DF(ConjugateGenerator::closed_form(GeneratorSpec::g_range(1, 4)));
  CHECK(d2.lo == 1.0);
  CHECK(d2.hi == 4.0);
  CHECK(d2.bounded());
  const auto d3 = domain_DF(ConjugateGenerator::closed_form(GeneratorSpec::gamma_band(-1, 2)));
  CHECK(d3.lo == 0.0);
  CHECK(d3.lo_open);
  CHECK_FALSE(d3.bounded_above());
}

TEST_CASE("biconjugate of the gamma band") {
  const auto conj = ConjugateGenerator::closed_form(GeneratorSpec::gamma_band(-1, 2));
  auto a_grid = logspace(1e-6, 50.0, 4001);
  a_grid.push_back(1.0);  // the kink of F, where hhat(0) is attained
  std::sort(a_grid.begin(), a_grid.end());
  CHECK(biconjugate(conj, 0, 0, 0, 0, 0.0, a_grid).value() == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(biconjugate(conj, 0, 0, 0, 0, -2.0, a_grid).value() == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(biconjugate(conj, 0, 0, 0, 0, 3.0, a_grid).is_unbounded());
  const auto closed = BiconjugateGenerator::closed_form(GeneratorSpec::gamma_band(-1, 2));
  CHECK(closed(0, 0, 0, 0, 3.0).is_unbounded());
  CHECK(closed(0, 0, 0, 0, -2.0).value() == -0.5);
  CHECK(closed(0, 0, 0, 0, 1.5).value() == 0.75);
}

TEST_CASE("biconjugate of G-range is the G function") {
  const auto spec = GeneratorSpec::g_range(1.0, 4.0);
  const auto conj = ConjugateGenerator::closed_form(spec);
  const auto a_grid = linspace(1.0, 4.0, 31);
  for (double g : linspace(-3.0, 3.0, 25)) {
    const double expected = 0.5 * (4.0 * pos(g) - 1.0 * neg(g));
    CHECK(biconjugate(conj, 0, 0, 0, 0, g, a_grid).value() == doctest::Approx(expected).epsilon(1e-12));
    // hhat = H for this convex nondecreasing generator.
    CHECK(eval_H(spec, 0, 0, 0, 0, g).value() == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("single volatility biconjugate is linear") {
  const auto closed = BiconjugateGenerator::closed_form(GeneratorSpec::single_vol(1.0));
  for (double g : {-2.0, 0.0, 0.7, 3.0}) CHECK(closed(0, 0, 0, 0, g).value() == doctest::Approx(0.5 * g));
}

TEST_CASE("Fenchel inequality and hhat <= H on random grids") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lo_d(-3.0, -0.1), hi_d(0.1, 3.0), a_d(0.05, 6.0), g_d(-4.0, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double lo = lo_d(rng), hi = hi_d(rng);
    const std::vector<GeneratorSpec> specs{GeneratorSpec::gamma_band(lo, hi),
                                           GeneratorSpec::g_range(-lo, -lo + hi),
                                           GeneratorSpec::single_vol(hi)};
    for (const auto& spec : specs) {
      const auto hhat = BiconjugateGenerator::closed_form(spec);
      for (int s = 0; s < 20; ++s) {
        const double a = a_d(rng), g = g_d(rng);
        const ExtReal F = conjugate_closed(spec, 0, 0, 0, 0, a);
        const ExtReal H = eval_H(spec, 0, 0, 0, 0, g);
        if (F.is_finite() && H.is_finite()) CHECK(0.5 * a * g <= F.value() + H.value() + 1e-12);
        const ExtReal h = hhat(0, 0, 0, 0, g);
        if (H.is_finite()) {
          REQUIRE(h.is_finite());
          CHECK(h.value() <= H.value() + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("F is midpoint convex in a") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a_d(0.05, 6.0);
  const auto spec = GeneratorSpec::gamma_band(-1.5, 0.7);
  for (int i = 0; i < 500; ++i) {
    const double a = a_d(rng), b = a_d(rng);
    const double mid = conjugate_closed(spec, 0, 0, 0, 0, 0.5 * (a + b)).value();
    const double avg = 0.5 * (conjugate_closed(spec, 0, 0, 0, 0, a).value() +
                              conjugate_closed(spec, 0, 0, 0, 0, b).value());
    CHECK(mid <= avg + 1e-9);
  }
}

TEST_CASE("custom generator goes through the numeric path") {
  // H = g^2 / 2 has conjugate a^2 / 8.
  const auto spec = GeneratorSpec::custom(
      [](double, double, double, double, double g) { return ExtReal(0.5 * g * g); },
      Interval::real_line());
  CHECK_THROWS_AS(conjugate_closed(spec, 0, 0, 0, 0, 1.0), DomainError);
  const auto conj = ConjugateGenerator::numeric(spec, linspace(-20.0, 20.0, 40001), linspace(0.1, 4.0, 40));
  CHECK(conj(0, 0, 0, 0, 2.0).value() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(conj.a_domain().approximate);
}

TEST_CASE("Lipschitz estimate of a linear reaction") {
  Reaction f = [](double, double, double y, double) { return 3.0 * y; };
  const auto conj = ConjugateGenerator::closed_form(GeneratorSpec::single_vol(1.0, f));
  const std::vector<double> rates{1.0};
  CHECK(estimate_lipschitz_y(conj, rates) == doctest::Approx(3.0));
}

TEST_CASE("extended reals order unbounded last") {
  CHECK(ExtReal(1.0) < ExtReal::unbounded());
  CHECK_FALSE(ExtReal::unbounded() < ExtReal(1e300));
  CHECK(ExtReal::unbounded() == ExtReal::unbounded() + 5.0);
  CHECK(std::isinf(ExtReal::unbounded().value()));
}

}
