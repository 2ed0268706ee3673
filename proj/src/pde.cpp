#include "twobsde/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "twobsde/errors.hpp"

namespace twobsde {

PDESolution solve_pde(const PDEProblem& prob, const TimeGrid& tg, const SpaceGrid& sg,
                      const ControlGrid& cg, const QuadratureRule& quad) {
  cg.validate(prob.conj.a_domain());
  check_stability(prob.conj, cg.values(), tg.dt(), sg.center());

  const int n = tg.n_steps();
  const double dt = tg.dt();
  const double dx = sg.dx();
  std::vector<ValueSurface> vs(n + 1, ValueSurface(sg));
  vs[n] = ValueSurface::from_function(sg, [&](double x) { return prob.terminal(x); });
  std::vector<std::vector<double>> argmax(n, std::vector<double>(sg.size()));

  std::vector<double> hamiltonian(sg.size());
  std::vector<double> averaged(sg.size());
  for (int k = n - 1; k >= 0; --k) {
    const double t = tg.t(k);
    const ValueSurface& next = vs[k + 1];
    std::fill(hamiltonian.begin(), hamiltonian.end(), -std::numeric_limits<double>::infinity());
    for (double a : cg.values()) {
      const ExpectationStencil stencil = make_stencil(a, dt, quad, dx);
      for (std::size_t j = 0; j < sg.size(); ++j) averaged[j] = expectation_at(next, j, stencil);
      for (std::size_t j = 0; j < sg.size(); ++j) {
        const double curvature = 2.0 * (averaged[j] - next[j]) / (a * dt);
        const double slope = first_derivative_at(averaged, j, dx);
        const ExtReal f = prob.conj(t, sg.x(j), averaged[j], slope, a);
        if (f.is_unbounded()) throw DomainError("solve_pde: f is infinite on the control grid");
        const double h = 0.5 * a * curvature - f.value();
        if (h > hamiltonian[j]) {
          hamiltonian[j] = h;
          argmax[k][j] = a;
        }
      }
    }
    for (std::size_t j = 0; j < sg.size(); ++j) {
      double v = next[j] + dt * hamiltonian[j];
      if (prob.source) v -= dt * prob.source(t, sg.x(j));
      vs[k][j] = v;
    }
  }

  ControlScenario optimal = ControlScenario::feedback(std::move(argmax));
  optimal.set_label("optimal");
  return PDESolution{tg, std::move(vs), std::move(optimal)};
}

FeynmanKacReport feynman_kac_verify(const std::vector<ValueSurface>& v, const TimeGrid& tg,
                                    const ConjugateGenerator& conj,
                                    const BiconjugateGenerator& hhat,
                                    const ControlScenario& scenario,
                                    const std::vector<ControlScenario>& probes,
                                    const QuadratureRule& quad, double x0) {
  const int n = tg.n_steps();
  if (static_cast<int>(v.size()) != n + 1)
    throw DomainError("feynman_kac_verify: series length does not match the time grid");
  const SpaceGrid& sg = v.front().grid();
  scenario.validate(conj.a_domain(), tg, sg);

  FeynmanKacReport r;
  r.k_min = std::numeric_limits<double>::infinity();
  const double dt = tg.dt();

  std::vector<ControlScenario> all{scenario};
  all.insert(all.end(), probes.begin(), probes.end());
  for (const auto& s : probes) s.validate(conj.a_domain(), tg, sg);
  std::vector<std::vector<ValueSurface>> densities(all.size(),
                                                   std::vector<ValueSurface>(n, ValueSurface(sg)));

  for (int k = 0; k < n; ++k) {
    const double t = tg.t(k);
    const ValueSurface dv = first_derivative(v[k]);
    const ValueSurface d2v = second_derivative(v[k]);
    for (std::size_t j = 0; j < sg.size(); ++j) {
      const double x = sg.x(j);
      const ExtReal h = hhat(t, x, v[k][j], dv[j], d2v[j]);
      if (h.is_unbounded()) {
        r.out_of_domain.emplace_back(k, j);
        continue;
      }
      const double dtv = (v[k + 1][j] - v[k][j]) / dt;
      r.residual_max = std::max(r.residual_max, std::abs(dtv + h.value()));
      for (std::size_t s = 0; s < all.size(); ++s) {
        const double a = all[s].at(k, t, j);
        const ExtReal f = conj(t, x, v[k][j], dv[j], a);
        if (f.is_unbounded()) throw DomainError("feynman_kac_verify: scenario leaves D_F");
        densities[s][k][j] = h.value() - 0.5 * a * d2v[j] + f.value();
      }
    }
  }

  for (const auto& surface : densities[0])
    for (double kv : surface.values()) r.k_min = std::min(r.k_min, kv);

  r.minimum_gap = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < all.size(); ++s) {
    std::vector<ValueSurface> increments = densities[s];
    for (auto& surface : increments)
      for (double& kv : surface.values()) kv *= dt;
    const double gap = lattice_expectation(increments, all[s], tg, quad, x0);
    r.scenario_gaps.push_back(gap);
    r.minimum_gap = std::min(r.minimum_gap, gap);
  }
  r.k_series = std::move(densities[0]);
  return r;
}

FeynmanKacReport feynman_kac_verify(const std::function<double(double, double)>& v,
                                    const TimeGrid& tg, const SpaceGrid& sg,
                                    const ConjugateGenerator& conj,
                                    const BiconjugateGenerator& hhat,
                                    const ControlScenario& scenario,
                                    const std::vector<ControlScenario>& probes,
                                    const QuadratureRule& quad, double x0) {
  std::vector<ValueSurface> series;
  series.reserve(tg.n_steps() + 1);
  for (int k = 0; k <= tg.n_steps(); ++k) {
    const double t = tg.t(k);
    series.push_back(ValueSurface::from_function(sg, [&](double x) { return v(t, x); }));
  }
  return feynman_kac_verify(series, tg, conj, hhat, scenario, probes, quad, x0);
}

void write_csv(std::ostream& os, const PDESolution& sol) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "t,x,v,a_star\n";
  const SpaceGrid& grid = sol.space_grid();
  const int n = sol.time_grid.n_steps();
  for (int k = 0; k <= n; ++k) {
    const double t = sol.time_grid.t(k);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      buf << t << ',' << grid.x(j) << ',' << sol.values[k][j] << ',';
      if (k < n) buf << sol.optimal_control.at(k, t, j);
      buf << '\n';
    }
  }
  os << buf.str();
}

}  // namespace twobsde

namespace twobsde {

double manufactured_solution(double t, double x) { return std::exp(-t) * std::sin(x); }

std::function<double(double, double)> manufactured_source(BiconjugateGenerator hhat) {
  return [hhat = std::move(hhat)](double t, double x) {
    const double v = manufactured_solution(t, x);
    const double dv = std::exp(-t) * std::cos(x);
    const ExtReal h = hhat(t, x, v, dv, -v);
    if (h.is_unbounded()) throw DomainError("manufactured solution leaves the domain of hhat");
    return -v + h.value();
  };
}

}  // namespace twobsde
