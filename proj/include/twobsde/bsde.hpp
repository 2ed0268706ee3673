#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "twobsde/control.hpp"
#include "twobsde/generators.hpp"
#include "twobsde/grid.hpp"
#include "twobsde/payoff.hpp"

namespace twobsde {

/// Data of one backward step t_k -> t_{k+1}.
struct StepContext {
  const ConjugateGenerator& conj;
  const QuadratureRule& quad;
  int k;
  double t;
  double dt;
};

/// The single-control backward operator at a whole time slice:
///   E   = E_a[next],
///   Z   = D E,
///   out = E - dt * F(t, x, E, Z, a).
struct BranchSurfaces {
  ValueSurface expectation;
  ValueSurface z;
  ValueSurface value;
};

BranchSurfaces bsde_step(const ValueSurface& next, double a, const StepContext& ctx);

/// Caches expectation stencils by variance rate within one time step.
class StencilCache {
 public:
  StencilCache(const QuadratureRule& quad, double dt, double dx) : quad_(quad), dt_(dt), dx_(dx) {}
  const ExpectationStencil& get(double a);

 private:
  const QuadratureRule& quad_;
  double dt_;
  double dx_;
  std::map<double, ExpectationStencil> cache_;
};

struct BranchValue {
  double expectation;
  double z;
  double value;
};

/// The same operator evaluated at node j only. Produces bit-identical results to
/// bsde_step for the same a.
BranchValue bsde_step_at(const ValueSurface& next, std::size_t j, double a, const StepContext& ctx,
                         StencilCache& stencils);

/// Throws StabilityError unless dt * L_f < 1 for every rate in `rates`.
void check_stability(const ConjugateGenerator& conj, std::span<const double> rates, double dt,
                     double x_probe);

struct BSDESolution {
  TimeGrid time_grid;
  std::vector<ValueSurface> y_series;
  std::vector<ValueSurface> z_series;
  Payoff terminal;
  ControlScenario control;
  ConjugateGenerator conj;
};

/// Backward Euler recursion for the BSDE under a fixed volatility control,
///   Y_k = E_a[Y_{k+1}] - dt * F(t_k, x, E_a[Y_{k+1}], Z_k, a),  Z_k = D E_a[Y_{k+1}].
BSDESolution solve_bsde(const ConjugateGenerator& conj, const ControlScenario& control,
                        const Payoff& g, const TimeGrid& tg, const SpaceGrid& sg,
                        const QuadratureRule& quad);

struct AprioriReport {
  double max_abs_y = 0.0;
  double max_abs_g = 0.0;
  /// sum_k dt * max_x |F(t_k, x, 0, 0, a(t_k, x))|
  double driver_integral = 0.0;
  double ratio = 0.0;
  /// False when the bound was only reported: a nonzero driver, or a terminal
  /// surface whose linear extension is unbounded so that sup|g| over the line is
  /// infinite and the maximum principle holds trivially.
  bool asserted = false;
  bool passed = true;
};

/// Discrete maximum-principle check max|Y| <= max|g| for a zero driver. Otherwise
/// the ratio max|Y| / (max|g| + sum dt max|F(.,0,0,a)|) is reported without a
/// hard constant. With `bound_report_only` nothing is asserted.
AprioriReport apriori_check(const BSDESolution& sol, bool bound_report_only);

/// Long-format CSV `t,x,y,z`.
void write_csv(std::ostream& os, const BSDESolution& sol);

}  // namespace twobsde
