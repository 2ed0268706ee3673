#include "twobsde/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "twobsde/errors.hpp"

namespace twobsde {

namespace {

double driver(const StepContext& ctx, double x, double y, double z, double a) {
  const ExtReal f = ctx.conj(ctx.t, x, y, z, a);
  if (f.is_unbounded()) {
    std::ostringstream os;
    os << "F is infinite at a = " << a << " (D_F = " << ctx.conj.a_domain().to_string() << ")";
    throw DomainError(os.str());
  }
  return f.value();
}

}  // namespace

const ExpectationStencil& StencilCache::get(double a) {
  auto it = cache_.find(a);
  if (it == cache_.end()) it = cache_.emplace(a, make_stencil(a, dt_, quad_, dx_)).first;
  return it->second;
}

BranchSurfaces bsde_step(const ValueSurface& next, double a, const StepContext& ctx) {
  const SpaceGrid& grid = next.grid();
  const ExpectationStencil stencil = make_stencil(a, ctx.dt, ctx.quad, grid.dx());
  BranchSurfaces out{one_step_expectation(next, stencil), ValueSurface(grid), ValueSurface(grid)};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out.z[j] = first_derivative_at(out.expectation.values(), j, grid.dx());
    const double e = out.expectation[j];
    out.value[j] = e - ctx.dt * driver(ctx, grid.x(j), e, out.z[j], a);
  }
  return out;
}

BranchValue bsde_step_at(const ValueSurface& next, std::size_t j, double a, const StepContext& ctx,
                         StencilCache& stencils) {
  const SpaceGrid& grid = next.grid();
  const ExpectationStencil& stencil = stencils.get(a);
  const std::size_t n = grid.size();
  // Neighbouring expectations under the same rate, as first_derivative_at sees them.
  const std::size_t lo = j == 0 ? 0 : j - 1;
  const std::size_t hi = j == n - 1 ? n - 1 : j + 1;
  double local[3];
  for (std::size_t i = lo; i <= hi; ++i) local[i - lo] = expectation_at(next, i, stencil);
  const std::span<const double> window(local, hi - lo + 1);
  const std::size_t centre = j - lo;

  BranchValue out{};
  out.expectation = local[centre];
  if (j == 0 || j == n - 1)
    out.z = (window[hi - lo] - window[0]) / grid.dx();
  else
    out.z = (window[2] - window[0]) / (2.0 * grid.dx());
  out.value = out.expectation - ctx.dt * driver(ctx, grid.x(j), out.expectation, out.z, a);
  return out;
}

void check_stability(const ConjugateGenerator& conj, std::span<const double> rates, double dt,
                     double x_probe) {
  std::vector<double> probe(rates.begin(), rates.end());
  if (probe.size() > 3) probe = {rates.front(), rates[rates.size() / 2], rates.back()};
  const double lip = estimate_lipschitz_y(conj, probe, x_probe);
  if (dt * lip >= 1.0) {
    const double admissible = 1.0 / lip;
    std::ostringstream os;
    os << "time step " << dt << " violates dt * L_f < 1 (L_f ~ " << lip
       << "); admissible dt < " << admissible;
    throw StabilityError(os.str(), admissible);
  }
}

BSDESolution solve_bsde(const ConjugateGenerator& conj, const ControlScenario& control,
                        const Payoff& g, const TimeGrid& tg, const SpaceGrid& sg,
                        const QuadratureRule& quad) {
  control.validate(conj.a_domain(), tg, sg);
  const std::vector<double> rates = control.distinct_values();
  check_stability(conj, rates, tg.dt(), sg.center());

  const int n = tg.n_steps();
  std::vector<ValueSurface> ys(n + 1, ValueSurface(sg));
  std::vector<ValueSurface> zs(n + 1, ValueSurface(sg));
  ys[n] = ValueSurface::from_function(sg, [&g](double x) { return g(x); });
  zs[n] = first_derivative(ys[n]);

  for (int k = n - 1; k >= 0; --k) {
    const StepContext ctx{conj, quad, k, tg.t(k), tg.dt()};
    if (control.is_feedback()) {
      StencilCache stencils(quad, tg.dt(), sg.dx());
      for (std::size_t j = 0; j < sg.size(); ++j) {
        const BranchValue b = bsde_step_at(ys[k + 1], j, control.at(k, ctx.t, j), ctx, stencils);
        ys[k][j] = b.value;
        zs[k][j] = b.z;
      }
    } else {
      BranchSurfaces b = bsde_step(ys[k + 1], control.at(k, ctx.t, 0), ctx);
      ys[k] = std::move(b.value);
      zs[k] = std::move(b.z);
    }
  }
  return BSDESolution{tg, std::move(ys), std::move(zs), g, control, conj};
}

AprioriReport apriori_check(const BSDESolution& sol, bool bound_report_only) {
  AprioriReport r;
  for (const auto& y : sol.y_series)
    for (double v : y.values()) r.max_abs_y = std::max(r.max_abs_y, std::abs(v));
  for (double v : sol.y_series.back().values()) r.max_abs_g = std::max(r.max_abs_g, std::abs(v));

  const SpaceGrid& grid = sol.y_series.front().grid();
  const TimeGrid& tg = sol.time_grid;
  for (int k = 0; k < tg.n_steps(); ++k) {
    double worst = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const ExtReal f0 = sol.conj(tg.t(k), grid.x(j), 0.0, 0.0, sol.control.at(k, tg.t(k), j));
      worst = std::max(worst, std::abs(f0.value()));
    }
    r.driver_integral += tg.dt() * worst;
  }
  const double bound = r.max_abs_g + r.driver_integral;
  r.ratio = bound > 0.0 ? r.max_abs_y / bound : (r.max_abs_y > 0.0 ? INFINITY : 0.0);
  const auto g = sol.y_series.back().values();
  const std::size_t m = g.size();
  const bool flat_ends = g[0] == g[1] && g[m - 1] == g[m - 2];
  r.asserted = !bound_report_only && flat_ends && r.driver_integral == 0.0 && !sol.conj.base().has_reaction();
  r.passed = !r.asserted || r.max_abs_y <= bound + 1e-12;
  return r;
}

void write_csv(std::ostream& os, const BSDESolution& sol) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "t,x,y,z\n";
  const SpaceGrid& grid = sol.y_series.front().grid();
  for (int k = 0; k <= sol.time_grid.n_steps(); ++k)
    for (std::size_t j = 0; j < grid.size(); ++j)
      buf << sol.time_grid.t(k) << ',' << grid.x(j) << ',' << sol.y_series[k][j] << ','
          << sol.z_series[k][j] << '\n';
  os << buf.str();
}

}  // namespace twobsde
