#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "twobsde/bsde.hpp"
#include "twobsde/twobsde.hpp"

namespace twobsde {

/// Terminal-value problem  d_t v + hhat(t, x, v, Dv, D^2 v) = source(t, x),
/// v(1, x) = g(x). The time loop consumes hhat through its dual f (`conj`).
struct PDEProblem {
  ConjugateGenerator conj;
  BiconjugateGenerator hhat;
  Payoff terminal;
  std::function<double(double t, double x)> source;
};

struct PDESolution {
  TimeGrid time_grid;
  std::vector<ValueSurface> values;
  ControlScenario optimal_control;

  const SpaceGrid& space_grid() const { return values.front().grid(); }
};

/// Explicit monotone scheme in Hamiltonian form
///   v_k = v_{k+1} + dt * max_a { a Gamma^a / 2 - f(t_k, x, E_a v, D E_a v, a) } - dt * source,
/// with the quadrature curvature Gamma^a = 2 (E_a[v_{k+1}] - v_{k+1}) / (a dt).
PDESolution solve_pde(const PDEProblem& prob, const TimeGrid& tg, const SpaceGrid& sg,
                      const ControlGrid& cg, const QuadratureRule& quad);

struct FeynmanKacReport {
  /// max |(v_{k+1} - v_k)/dt + hhat(t_k, x, v_k, Dv_k, D^2 v_k)|
  double residual_max = 0.0;
  /// min of k_series
  double k_min = 0.0;
  /// k_t = hhat(Gamma) - a Gamma / 2 + f(a) under the primary scenario, t_0..t_{N-1}
  std::vector<ValueSurface> k_series;
  /// min over scenarios of E[sum_k k_k dt] from (0, x0)
  double minimum_gap = 0.0;
  std::vector<double> scenario_gaps;
  /// (k, j) where D^2 v falls outside the domain of hhat; excluded from the residual.
  std::vector<std::pair<int, std::size_t>> out_of_domain;
};

/// Reads Y = v, Z = Dv, Gamma = D^2 v off a lattice series and checks the
/// decomposition dK = k dt. `probes` are additional scenarios for the minimum gap.
FeynmanKacReport feynman_kac_verify(const std::vector<ValueSurface>& v, const TimeGrid& tg,
                                    const ConjugateGenerator& conj,
                                    const BiconjugateGenerator& hhat,
                                    const ControlScenario& scenario,
                                    const std::vector<ControlScenario>& probes,
                                    const QuadratureRule& quad, double x0);

/// Tabulates a closed-form v(t, x) on the lattice and verifies it.
FeynmanKacReport feynman_kac_verify(const std::function<double(double, double)>& v,
                                    const TimeGrid& tg, const SpaceGrid& sg,
                                    const ConjugateGenerator& conj,
                                    const BiconjugateGenerator& hhat,
                                    const ControlScenario& scenario,
                                    const std::vector<ControlScenario>& probes,
                                    const QuadratureRule& quad, double x0);

/// CSV `t,x,v,a_star`.
void write_csv(std::ostream& os, const PDESolution& sol);

}  // namespace twobsde

namespace twobsde {

/// Smooth test solution v*(t, x) = e^{-t} sin x.
double manufactured_solution(double t, double x);

/// Source s = d_t v* + hhat(t, x, v*, Dv*, D^2 v*) that makes v* exact. Throws
/// DomainError where hhat is unbounded along v*.
std::function<double(double t, double x)> manufactured_source(BiconjugateGenerator hhat);

}  // namespace twobsde
