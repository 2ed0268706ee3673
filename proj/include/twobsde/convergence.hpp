#pragma once

#include <string>
#include <vector>

#include "twobsde/generators.hpp"

namespace twobsde {

struct LadderLevel {
  int n_steps = 0;
  int n_points = 0;
};

struct ConvergenceRow {
  LadderLevel level;
  double dt = 0.0;
  double dx = 0.0;
  /// Scalar value for point studies, max nodal error for the manufactured study.
  double value = 0.0;
  double error = 0.0;
  bool is_reference = false;
};

struct ConvergenceResult {
  std::string study;
  std::string reference;
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log error against log dt (resp. dx); NaN when the
  /// step does not vary across the compared levels.
  double order_dt = 0.0;
  double order_dx = 0.0;
  /// Errors strictly decrease along the ladder.
  bool monotone = false;
};

struct ConvergenceSetup {
  /// bachelier_call | heat_square | manufactured
  std::string study;
  /// closed_form | finest
  std::string reference = "closed_form";
  GeneratorSpec generator = GeneratorSpec::single_vol(1.0);
  /// Strike of the bachelier_call study.
  double strike = 0.0;
  std::vector<LadderLevel> ladder;
  double center = 0.0;
  double half_width = 6.0;
  int quadrature_nodes = 16;
  /// Control grid; empty means the endpoints of D_F.
  std::vector<double> controls;
  double x0 = 0.0;
  /// Errors of the manufactured study are measured on |x - center| <= window.
  double window = 2.0;
};

/// Slope of log(err) on log(h) over entries with err > 0. NaN with < 2 usable
/// points or when h is constant.
double fitted_order(const std::vector<double>& h, const std::vector<double>& err);

/// Throws ConfigError for ladders shorter than three levels or studies without
/// a closed form for the configured generator.
ConvergenceResult run_convergence(const ConvergenceSetup& setup);

}  // namespace twobsde
