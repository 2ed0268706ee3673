#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace twobsde {

/// Terminal condition g(x). The named registry entries all have closed-form
/// Gaussian expectations, which is what the test oracles rely on.
class Payoff {
 public:
  Payoff(std::string name, std::function<double(double)> fn)
      : name_(std::move(name)), fn_(std::move(fn)) {}

  static Payoff call(double strike);
  static Payoff put(double strike);
  static Payoff callspread(double k1, double k2);
  static Payoff abs();
  static Payoff square();
  static Payoff neg_square();
  static Payoff linear(double beta);
  static Payoff butterfly(double strike, double wing);
  static Payoff constant(double c);
  /// Piecewise-linear through (xs, ys), extended linearly with the end slopes.
  static Payoff table(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const { return fn_(x); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::function<double(double)> fn_;
};

}  // namespace twobsde
