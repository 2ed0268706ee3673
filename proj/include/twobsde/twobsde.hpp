#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twobsde/bsde.hpp"

namespace twobsde {

struct TwoBSDESolution {
  TimeGrid time_grid;
  std::vector<ValueSurface> y_series;
  std::vector<ValueSurface> z_series;
  std::vector<ValueSurface> gamma_series;
  /// Feedback control a*(t_k, x_j) attaining the maximum, ties to the smallest rate.
  ControlScenario optimal_control;
  ControlGrid controls;
  Payoff terminal;
  /// Share of (k, j) whose maximiser sits on a control-grid end that is interior
  /// to D_F, i.e. where truncating the grid may bias the value.
  double edge_fraction = 0.0;

  const SpaceGrid& space_grid() const { return y_series.front().grid(); }
};

/// Dynamic-programming recursion
///   Y_k = max_{a in A} { E_a[Y_{k+1}] - dt * F(t_k, x, E_a[Y_{k+1}], Z^a_k, a) }.
TwoBSDESolution solve_2bsde(const ConjugateGenerator& conj, const Payoff& g, const TimeGrid& tg,
                            const SpaceGrid& sg, const ControlGrid& cg,
                            const QuadratureRule& quad);

struct KPath {
  ControlScenario scenario;
  TimeGrid time_grid;
  /// increments[k] is the increase of K over [t_k, t_{k+1}].
  std::vector<ValueSurface> increments;
  /// cumulative[0] = 0, cumulative[k+1] = cumulative[k] + increments[k], nodewise.
  std::vector<ValueSurface> cumulative;

  double min_increment() const;
  double max_terminal() const;
};

/// Nodal K increments of the 2BSDE value relative to the one-step BSDE value
/// under `scenario`.
KPath extract_K(const TwoBSDESolution& sol, const ConjugateGenerator& conj,
                const ControlScenario& scenario, const QuadratureRule& quad);

/// E[sum_k increments[k]] started from (0, x0), propagated through the lattice
/// transition kernel of `scenario`.
double lattice_expectation(const std::vector<ValueSurface>& increments,
                           const ControlScenario& scenario, const TimeGrid& tg,
                           const QuadratureRule& quad, double x0);

struct MinimumConditionReport {
  std::vector<std::string> labels;
  /// Expected terminal K per scenario.
  std::vector<double> expected_K;
  double gap = 0.0;
  std::size_t attained_by = 0;
};

MinimumConditionReport minimum_condition_gap(const TwoBSDESolution& sol,
                                             const ConjugateGenerator& conj,
                                             const std::vector<ControlScenario>& scenarios,
                                             double x0, const QuadratureRule& quad);

struct ComparisonReport {
  bool terminal_dominates = false;
  /// max over nodes and steps of (Y1 - Y2)^+
  double max_violation = 0.0;
  bool passed = true;
};

/// If g1 <= g2 nodewise, checks Y1 <= Y2 at every node and step within `tol`.
ComparisonReport comparison_check(const TwoBSDESolution& sol1, const TwoBSDESolution& sol2,
                                  double tol = 1e-12);

struct RepresentationEntry {
  double a = 0.0;
  /// max (Y^a - Y)^+ over nodes and steps
  double violation = 0.0;
  /// max (Y - Y^a) over nodes and steps
  double max_gap = 0.0;
  /// (Y - Y^a)(0, x0)
  double gap_at_x0 = 0.0;
};

struct RepresentationReport {
  std::vector<RepresentationEntry> entries;
  double max_violation = 0.0;
  /// max |Y_k - T_{a*}(Y_{k+1})|: the recursion is attained by its argmax branch.
  double argmax_mismatch = 0.0;
  bool passed = true;
};

/// Checks Y >= Y^a (single-control BSDE value) for every constant a in the grid.
RepresentationReport representation_lower_bound(const ConjugateGenerator& conj, const Payoff& g,
                                                const TimeGrid& tg, const SpaceGrid& sg,
                                                const ControlGrid& cg, const QuadratureRule& quad,
                                                double x0, double tol = 1e-10);

/// CSV `t,x,y,z,gamma,a_star`.
void write_csv(std::ostream& os, const TwoBSDESolution& sol);
/// CSV `t,x,dK,K`.
void write_csv(std::ostream& os, const KPath& path);

}  // namespace twobsde
