#include "twobsde/convergence.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "twobsde/errors.hpp"
#include "twobsde/grid.hpp"
#include "twobsde/payoff.hpp"
#include "twobsde/pde.hpp"
#include "twobsde/twobsde.hpp"

namespace twobsde {

namespace {

// Variance rate selected by a convex payoff, when it is known in closed form.
double convex_rate(const GeneratorSpec& spec) {
  if (spec.has_reaction())
    throw ConfigError("closed-form reference needs a generator without reaction; use reference 'finest'");
  if (const auto* s = std::get_if<SingleVol>(&spec.kind())) return s->a0;
  if (const auto* r = std::get_if<GRange>(&spec.kind())) return r->a_hi;
  throw ConfigError("closed-form reference needs single_vol or g_range; use reference 'finest'");
}

double bachelier_call(double x0, double strike, double a) {
  const double s = std::sqrt(a);
  const double d = (x0 - strike) / s;
  const double pdf = std::exp(-0.5 * d * d) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-d / std::numbers::sqrt2);
  return (x0 - strike) * cdf + s * pdf;
}

std::vector<double> default_controls(const GeneratorSpec& spec) {
  if (const auto* s = std::get_if<SingleVol>(&spec.kind())) return {s->a0};
  if (const auto* r = std::get_if<GRange>(&spec.kind()))
    return r->a_lo == r->a_hi ? std::vector<double>{r->a_lo} : std::vector<double>{r->a_lo, r->a_hi};
  throw ConfigError("this generator needs an explicit control grid");
}

}  // namespace

double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (err[i] > 0.0 && h[i] > 0.0) {
      lx.push_back(std::log(h[i]));
      ly.push_back(std::log(err[i]));
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (lx.size() < 2) return nan;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx < 1e-24) return nan;
  return sxy / sxx;
}

ConvergenceResult run_convergence(const ConvergenceSetup& setup) {
  if (setup.ladder.size() < 3) throw ConfigError("convergence ladder needs at least 3 levels");
  if (setup.reference != "closed_form" && setup.reference != "finest")
    throw ConfigError("convergence reference must be closed_form or finest");
  const bool closed = setup.reference == "closed_form";

  const ConjugateGenerator conj = ConjugateGenerator::closed_form(setup.generator);
  const ControlGrid cg(setup.controls.empty() ? default_controls(setup.generator) : setup.controls);
  const QuadratureRule quad = QuadratureRule::gauss_hermite(setup.quadrature_nodes);

  ConvergenceResult out;
  out.study = setup.study;
  out.reference = setup.reference;

  double exact = 0.0;
  bool point_study = true;
  Payoff payoff = Payoff::call(0.0);
  if (setup.study == "bachelier_call") {
    payoff = Payoff::call(setup.strike);
    if (closed) exact = bachelier_call(setup.x0, setup.strike, convex_rate(setup.generator));
  } else if (setup.study == "heat_square") {
    payoff = Payoff::square();
    if (closed) exact = setup.x0 * setup.x0 + convex_rate(setup.generator);
  } else if (setup.study == "manufactured") {
    point_study = false;
    payoff = Payoff("manufactured", [](double x) { return manufactured_solution(1.0, x); });
  } else {
    throw ConfigError("convergence study must be bachelier_call, heat_square or manufactured");
  }

  std::vector<ValueSurface> finals;
  for (const auto& level : setup.ladder) {
    if (level.n_points < 3 || level.n_points % 2 == 0 || level.n_steps < 1)
      throw ConfigError("ladder levels need n_steps >= 1 and odd n_points >= 3");
    const TimeGrid tg(level.n_steps);
    const SpaceGrid sg(setup.center, setup.half_width, level.n_points);
    ConvergenceRow row;
    row.level = level;
    row.dt = tg.dt();
    row.dx = sg.dx();
    if (point_study) {
      const auto sol = solve_2bsde(conj, payoff, tg, sg, cg, quad);
      row.value = sol.y_series.front().interpolate(setup.x0);
      finals.push_back(sol.y_series.front());
    } else {
      const auto hhat = BiconjugateGenerator::closed_form(setup.generator);
      PDEProblem prob{conj, hhat, payoff, manufactured_source(hhat)};
      const auto sol = solve_pde(prob, tg, sg, cg, quad);
      finals.push_back(sol.values.front());
    }
    out.rows.push_back(row);
  }

  const ValueSurface& finest = finals.back();
  if (!closed) out.rows.back().is_reference = true;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    auto& row = out.rows[i];
    if (row.is_reference) continue;
    if (point_study) {
      const double ref = closed ? exact : finest.interpolate(setup.x0);
      row.error = std::abs(row.value - ref);
    } else {
      const SpaceGrid& sg = finals[i].grid();
      double err = 0.0;
      for (std::size_t j = 0; j < sg.size(); ++j) {
        const double x = sg.x(j);
        if (std::abs(x - setup.center) > setup.window + 1e-12) continue;
        const double ref = closed ? manufactured_solution(0.0, x) : finest.interpolate(x);
        err = std::max(err, std::abs(finals[i][j] - ref));
      }
      row.value = err;
      row.error = err;
    }
  }

  std::vector<double> dts, dxs, errs;
  for (const auto& row : out.rows) {
    if (row.is_reference) continue;
    dts.push_back(row.dt);
    dxs.push_back(row.dx);
    errs.push_back(row.error);
  }
  out.order_dt = fitted_order(dts, errs);
  out.order_dx = fitted_order(dxs, errs);
  out.monotone = true;
  for (std::size_t i = 1; i < errs.size(); ++i)
    if (!(errs[i] < errs[i - 1])) out.monotone = false;
  return out;
}

}  // namespace twobsde
