#include "twobsde/twobsde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "twobsde/errors.hpp"

namespace twobsde {

namespace {
constexpr double kTieTolerance = 1e-14;
}  // namespace

TwoBSDESolution solve_2bsde(const ConjugateGenerator& conj, const Payoff& g, const TimeGrid& tg,
                            const SpaceGrid& sg, const ControlGrid& cg,
                            const QuadratureRule& quad) {
  const Interval domain = conj.a_domain();
  cg.validate(domain);
  check_stability(conj, cg.values(), tg.dt(), sg.center());

  const int n = tg.n_steps();
  std::vector<ValueSurface> ys(n + 1, ValueSurface(sg));
  std::vector<ValueSurface> zs(n + 1, ValueSurface(sg));
  std::vector<ValueSurface> gammas(n + 1, ValueSurface(sg));
  std::vector<std::vector<double>> argmax(n, std::vector<double>(sg.size()));

  ys[n] = ValueSurface::from_function(sg, [&g](double x) { return g(x); });
  zs[n] = first_derivative(ys[n]);
  gammas[n] = second_derivative(ys[n]);

  const bool low_edge_open = domain.extends_below(cg.front());
  const bool high_edge_open = domain.extends_above(cg.back());
  std::size_t at_edge = 0;

  for (int k = n - 1; k >= 0; --k) {
    const StepContext ctx{conj, quad, k, tg.t(k), tg.dt()};
    auto& y = ys[k];
    auto& z = zs[k];
    auto& best = argmax[k];
    bool first = true;
    for (double a : cg.values()) {
      const BranchSurfaces b = bsde_step(ys[k + 1], a, ctx);
      for (std::size_t j = 0; j < sg.size(); ++j) {
        // values within rounding of the incumbent count as ties and keep the smaller rate
        if (first || b.value[j] > y[j] + kTieTolerance * (1.0 + std::abs(y[j]))) {
          y[j] = b.value[j];
          z[j] = b.z[j];
          best[j] = a;
        }
      }
      first = false;
    }
    gammas[k] = second_derivative(y);
    for (double a : best)
      if ((low_edge_open && a == cg.front()) || (high_edge_open && a == cg.back())) ++at_edge;
  }

  ControlScenario optimal = ControlScenario::feedback(std::move(argmax));
  optimal.set_label("optimal");
  TwoBSDESolution sol{tg,      std::move(ys), std::move(zs), std::move(gammas),
                      optimal, cg,            g,             0.0};
  sol.edge_fraction = static_cast<double>(at_edge) / (static_cast<double>(n) * sg.size());
  return sol;
}

double KPath::min_increment() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& inc : increments)
    for (double v : inc.values()) m = std::min(m, v);
  return m;
}

double KPath::max_terminal() const {
  const auto v = cumulative.back().values();
  return *std::max_element(v.begin(), v.end());
}

KPath extract_K(const TwoBSDESolution& sol, const ConjugateGenerator& conj,
                const ControlScenario& scenario, const QuadratureRule& quad) {
  const TimeGrid& tg = sol.time_grid;
  const SpaceGrid& sg = sol.space_grid();
  scenario.validate(conj.a_domain(), tg, sg);

  const int n = tg.n_steps();
  std::vector<ValueSurface> inc(n, ValueSurface(sg));
  for (int k = 0; k < n; ++k) {
    const StepContext ctx{conj, quad, k, tg.t(k), tg.dt()};
    if (scenario.is_feedback()) {
      StencilCache stencils(quad, tg.dt(), sg.dx());
      for (std::size_t j = 0; j < sg.size(); ++j) {
        const BranchValue b =
            bsde_step_at(sol.y_series[k + 1], j, scenario.at(k, ctx.t, j), ctx, stencils);
        inc[k][j] = sol.y_series[k][j] - b.value;
      }
    } else {
      const BranchSurfaces b = bsde_step(sol.y_series[k + 1], scenario.at(k, ctx.t, 0), ctx);
      for (std::size_t j = 0; j < sg.size(); ++j) inc[k][j] = sol.y_series[k][j] - b.value[j];
    }
  }

  std::vector<ValueSurface> cum(n + 1, ValueSurface(sg));
  for (int k = 0; k < n; ++k)
    for (std::size_t j = 0; j < sg.size(); ++j) cum[k + 1][j] = cum[k][j] + inc[k][j];
  return KPath{scenario, tg, std::move(inc), std::move(cum)};
}

double lattice_expectation(const std::vector<ValueSurface>& increments,
                           const ControlScenario& scenario, const TimeGrid& tg,
                           const QuadratureRule& quad, double x0) {
  const SpaceGrid& sg = increments.front().grid();
  // Backward accumulation M_k = inc_k + E_a[M_{k+1}] is the adjoint of pushing the
  // point mass at x0 forward through the same kernel.
  ValueSurface acc(sg);
  for (int k = tg.n_steps() - 1; k >= 0; --k) {
    ValueSurface next(sg);
    StencilCache stencils(quad, tg.dt(), sg.dx());
    for (std::size_t j = 0; j < sg.size(); ++j) {
      const double a = scenario.at(k, tg.t(k), j);
      next[j] = increments[k][j] + expectation_at(acc, j, stencils.get(a));
    }
    acc = std::move(next);
  }
  return acc.interpolate(x0);
}

MinimumConditionReport minimum_condition_gap(const TwoBSDESolution& sol,
                                             const ConjugateGenerator& conj,
                                             const std::vector<ControlScenario>& scenarios,
                                             double x0, const QuadratureRule& quad) {
  if (scenarios.empty()) throw DomainError("minimum condition needs at least one scenario");
  MinimumConditionReport r;
  r.gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const KPath path = extract_K(sol, conj, scenarios[i], quad);
    const double expected = lattice_expectation(path.increments, scenarios[i], sol.time_grid, quad, x0);
    r.labels.push_back(scenarios[i].label());
    r.expected_K.push_back(expected);
    if (expected < r.gap) {
      r.gap = expected;
      r.attained_by = i;
    }
  }
  return r;
}

ComparisonReport comparison_check(const TwoBSDESolution& sol1, const TwoBSDESolution& sol2,
                                  double tol) {
  if (!(sol1.time_grid == sol2.time_grid) || !(sol1.space_grid() == sol2.space_grid()))
    throw DomainError("comparison_check: solutions live on different lattices");
  ComparisonReport r;
  const auto g1 = sol1.y_series.back().values();
  const auto g2 = sol2.y_series.back().values();
  r.terminal_dominates = true;
  for (std::size_t j = 0; j < g1.size(); ++j)
    if (g1[j] > g2[j]) r.terminal_dominates = false;

  for (std::size_t k = 0; k < sol1.y_series.size(); ++k) {
    const auto y1 = sol1.y_series[k].values();
    const auto y2 = sol2.y_series[k].values();
    for (std::size_t j = 0; j < y1.size(); ++j)
      r.max_violation = std::max(r.max_violation, y1[j] - y2[j]);
  }
  r.passed = !r.terminal_dominates || r.max_violation <= tol;
  return r;
}

RepresentationReport representation_lower_bound(const ConjugateGenerator& conj, const Payoff& g,
                                                const TimeGrid& tg, const SpaceGrid& sg,
                                                const ControlGrid& cg, const QuadratureRule& quad,
                                                double x0, double tol) {
  const TwoBSDESolution sol = solve_2bsde(conj, g, tg, sg, cg, quad);
  RepresentationReport r;
  for (double a : cg.values()) {
    const BSDESolution single = solve_bsde(conj, ControlScenario::constant(a), g, tg, sg, quad);
    RepresentationEntry e;
    e.a = a;
    e.max_gap = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= tg.n_steps(); ++k) {
      for (std::size_t j = 0; j < sg.size(); ++j) {
        const double diff = sol.y_series[k][j] - single.y_series[k][j];
        e.violation = std::max(e.violation, -diff);
        e.max_gap = std::max(e.max_gap, diff);
      }
    }
    e.gap_at_x0 = sol.y_series[0].interpolate(x0) - single.y_series[0].interpolate(x0);
    r.max_violation = std::max(r.max_violation, e.violation);
    r.entries.push_back(e);
  }

  // The maximum must be attained by the stored argmax branch.
  for (int k = 0; k < tg.n_steps(); ++k) {
    const StepContext ctx{conj, quad, k, tg.t(k), tg.dt()};
    StencilCache stencils(quad, tg.dt(), sg.dx());
    for (std::size_t j = 0; j < sg.size(); ++j) {
      const BranchValue b =
          bsde_step_at(sol.y_series[k + 1], j, sol.optimal_control.at(k, ctx.t, j), ctx, stencils);
      r.argmax_mismatch = std::max(r.argmax_mismatch, std::abs(sol.y_series[k][j] - b.value));
    }
  }
  r.passed = r.max_violation <= tol && r.argmax_mismatch <= tol;
  return r;
}

void write_csv(std::ostream& os, const TwoBSDESolution& sol) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "t,x,y,z,gamma,a_star\n";
  const SpaceGrid& grid = sol.space_grid();
  const int n = sol.time_grid.n_steps();
  for (int k = 0; k <= n; ++k) {
    const double t = sol.time_grid.t(k);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      buf << t << ',' << grid.x(j) << ',' << sol.y_series[k][j] << ',' << sol.z_series[k][j] << ','
          << sol.gamma_series[k][j] << ',';
      if (k < n) buf << sol.optimal_control.at(k, t, j);
      buf << '\n';
    }
  }
  os << buf.str();
}

void write_csv(std::ostream& os, const KPath& path) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "t,x,dK,K\n";
  const SpaceGrid& grid = path.cumulative.front().grid();
  const int n = path.time_grid.n_steps();
  for (int k = 0; k <= n; ++k)
    for (std::size_t j = 0; j < grid.size(); ++j)
      buf << path.time_grid.t(k) << ',' << grid.x(j) << ','
          << (k < n ? path.increments[k][j] : 0.0) << ',' << path.cumulative[k][j] << '\n';
  os << buf.str();
}

}  // namespace twobsde
