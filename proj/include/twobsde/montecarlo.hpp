#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "twobsde/payoff.hpp"

namespace twobsde {

/// Forward system on [0, t_stop], X_0 = 1, Y_0 = 0:
///   dY = -3 Y / (1-t) dt + X / sqrt(1-t) dB,
///   dX = -3 (1+c^2) X / (2 c^2 (1-t)) dt + 3 Y / (c sqrt(1-t)) dB.
/// R = 3 Y^2 / c^2 + X^2 has E[R_t] = (1-t)^3, so the constructed solution of the
/// Stratonovich-form equation is not the zero solution.
struct CounterexampleConfig {
  double c = 2.0;
  long n_paths = 100000;
  int n_steps = 4000;
  double t_stop = 0.999;
  std::uint64_t seed = 20240601;
  /// Paths are split into this many independently seeded batches; the reduction
  /// runs in batch order so the result does not depend on the thread count.
  int n_batches = 64;
};

struct CheckpointStat {
  double t = 0.0;        ///< requested time
  double t_grid = 0.0;   ///< nearest simulation time
  double mean_R = 0.0;
  double stderr_R = 0.0;
  double target = 0.0;   ///< (1 - t_grid)^3
  double z_score = 0.0;  ///< (mean - target) / stderr
  double mean_sup_y2 = 0.0;  ///< E[sup_{s in [t, t_stop]} Y_s^2]
  bool within_tolerance = false;
};

struct CounterexampleReport {
  CounterexampleConfig config;
  double dt = 0.0;
  /// |mean - target| <= 3 stderr + bias_budget counts as agreement.
  double bias_budget = 0.0;
  std::vector<CheckpointStat> checkpoints;
  /// beta in E[sup_{s >= t} Y_s^2] ~ C (1 - t)^beta, least squares over checkpoints t > 0.
  double decay_exponent = 0.0;
  double decay_prefactor = 0.0;
  /// sqrt(E[sum_k r_k^2]) where r_k is the defect of the Euler identity for Y over
  /// a doubled step, evaluated along the simulated path. Shrinks like sqrt(dt).
  double dynamics_residual = 0.0;
  bool all_within_tolerance = false;
};

/// Throws DomainError for invalid configs and StabilityError when the drift
/// coefficient times dt reaches 0.5 at t_stop.
CounterexampleReport simulate_counterexample(const CounterexampleConfig& cfg,
                                             const std::vector<double>& checkpoints,
                                             int n_threads = 0);

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// E[g(x0 + sqrt(a) W_1)] with antithetic pairs.
MCEstimate mc_terminal_value(const Payoff& g, double a, long n_paths, std::uint64_t seed,
                             double x0 = 0.0);

/// Threads used when the caller passes 0: TWOBSDE_NUM_THREADS or the hardware count.
int default_thread_count();

/// CSV `t,mean_R,stderr_R,target,(mean-target)/stderr`.
void write_csv(std::ostream& os, const CounterexampleReport& report);

}  // namespace twobsde
