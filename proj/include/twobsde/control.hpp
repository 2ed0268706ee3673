#pragma once

#include <string>
#include <variant>
#include <vector>

#include "twobsde/generators.hpp"
#include "twobsde/grid.hpp"

namespace twobsde {

/// A volatility control a(t_k, x_j) on the lattice: the discrete stand-in for a
/// probability measure under which the canonical process has quadratic variation
/// density a.
class ControlScenario {
 public:
  struct Constant {
    double a;
  };
  /// values[i] applies on [breakpoints[i-1], breakpoints[i]); breakpoints in (0, 1).
  struct PiecewiseConstant {
    std::vector<double> breakpoints;
    std::vector<double> values;
  };
  /// table[k][j] for steps k = 0..n_steps-1 and nodes j.
  struct Feedback {
    std::vector<std::vector<double>> table;
  };
  using Kind = std::variant<Constant, PiecewiseConstant, Feedback>;

  static ControlScenario constant(double a);
  static ControlScenario piecewise(std::vector<double> breakpoints, std::vector<double> values);
  static ControlScenario feedback(std::vector<std::vector<double>> table);

  const Kind& kind() const { return kind_; }
  bool is_feedback() const { return std::holds_alternative<Feedback>(kind_); }

  /// Control at step k (time t = t_k) and node j.
  double at(int k, double t, std::size_t j) const;

  /// Distinct values taken by the control, ascending.
  std::vector<double> distinct_values() const;

  /// Throws DomainError if a value leaves D_F or a feedback table does not match
  /// the lattice.
  void validate(const Interval& domain, const TimeGrid& tg, const SpaceGrid& sg) const;

  std::string label() const;
  void set_label(std::string label) { label_ = std::move(label); }

 private:
  explicit ControlScenario(Kind kind) : kind_(std::move(kind)) {}

  Kind kind_;
  std::string label_;
};

/// Candidate variance rates a_1 < ... < a_m for the supremum over controls.
class ControlGrid {
 public:
  explicit ControlGrid(std::vector<double> values);

  static ControlGrid uniform(double lo, double hi, std::size_t n);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  /// Values must lie in D_F, and a bounded D_F must have both endpoints present.
  void validate(const Interval& domain) const;

 private:
  std::vector<double> values_;
};

}  // namespace twobsde
