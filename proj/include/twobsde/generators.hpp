#pragma once

// Nonlinear generators H(t,x,y,z,gamma), their conjugates
//
//   F(t,x,y,z,a) = sup_{gamma in D_H} { a*gamma/2 - H(t,x,y,z,gamma) },
//
// and the biconjugate hhat(gamma) = sup_{a > 0} { a*gamma/2 - F(a) }.
// Everything is scalar (d = 1): a and gamma are real numbers, a:gamma = a*gamma.

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "twobsde/extended_real.hpp"

namespace twobsde {

/// Slope above which a maximand that is still growing at an open grid edge is
/// declared unbounded.
inline constexpr double kUnboundedSlope = 1e-6;

/// Interval on the real line with optionally open or infinite ends.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  bool hi_open = false;
  /// Set when the interval was estimated by scanning rather than known exactly.
  bool approximate = false;

  static Interval point(double v) { return {v, v, false, false, false}; }
  static Interval closed(double lo, double hi) { return {lo, hi, false, false, false}; }
  static Interval positive_reals() {
    return {0.0, std::numeric_limits<double>::infinity(), true, true, false};
  }
  static Interval real_line() { return {}; }

  bool contains(double v) const;
  bool is_point() const { return lo == hi && !lo_open && !hi_open; }
  bool bounded_above() const { return hi < std::numeric_limits<double>::infinity(); }
  bool bounded() const;
  /// True when the interval extends strictly beyond v on the left.
  bool extends_below(double v) const { return lo < v; }
  bool extends_above(double v) const { return hi > v; }

  std::string to_string() const;
};

/// f(t, x, y, z): the y/z-dependent part of the generator, entering as H = G - f.
using Reaction = std::function<double(double t, double x, double y, double z)>;
using GeneratorEvaluator =
    std::function<ExtReal(double t, double x, double y, double z, double gamma)>;
using ConjugateEvaluator =
    std::function<ExtReal(double t, double x, double y, double z, double a)>;

struct SingleVol {
  double a0;
};
struct GRange {
  double a_lo;
  double a_hi;
};
struct GammaBand {
  double gamma_lo;
  double gamma_hi;
};
struct CustomGenerator {
  GeneratorEvaluator evaluator;
  Interval gamma_domain;
};

using GeneratorKind = std::variant<SingleVol, GRange, GammaBand, CustomGenerator>;

class GeneratorSpec {
 public:
  explicit GeneratorSpec(GeneratorKind kind, Reaction reaction = {});

  static GeneratorSpec single_vol(double a0, Reaction reaction = {});
  static GeneratorSpec g_range(double a_lo, double a_hi, Reaction reaction = {});
  static GeneratorSpec gamma_band(double gamma_lo, double gamma_hi, Reaction reaction = {});
  static GeneratorSpec custom(GeneratorEvaluator evaluator, Interval gamma_domain,
                              Reaction reaction = {});

  const GeneratorKind& kind() const { return kind_; }
  bool is_builtin() const { return !std::holds_alternative<CustomGenerator>(kind_); }
  bool has_reaction() const { return static_cast<bool>(reaction_); }
  const Reaction& reaction() const { return reaction_; }
  double reaction_at(double t, double x, double y, double z) const {
    return reaction_ ? reaction_(t, x, y, z) : 0.0;
  }

  Interval gamma_domain() const;
  std::string name() const;

 private:
  GeneratorKind kind_;
  Reaction reaction_;
};

/// H(t,x,y,z,gamma); unbounded iff gamma lies outside D_H.
ExtReal eval_H(const GeneratorSpec& spec, double t, double x, double y, double z,
               double gamma);

/// Closed-form conjugate for the built-in kinds. Throws DomainError for custom
/// generators.
ExtReal conjugate_closed(const GeneratorSpec& spec, double t, double x, double y, double z,
                         double a);

/// Conjugate by brute-force maximisation over a curvature grid. Grid points where
/// H is infinite are skipped. Reports unbounded when the maximand still grows
/// faster than `slope_threshold` at a grid edge that is interior to D_H.
ExtReal conjugate_numeric(const GeneratorSpec& spec, double t, double x, double y, double z,
                          double a, std::span<const double> gamma_grid,
                          double slope_threshold = kUnboundedSlope);

class ConjugateGenerator {
 public:
  ConjugateGenerator(GeneratorSpec base, Interval a_domain, ConjugateEvaluator evaluator);

  /// Closed-form conjugate of a built-in generator.
  static ConjugateGenerator closed_form(const GeneratorSpec& spec);

  /// Numerical conjugate. The a-domain is estimated by scanning `a_scan` and is
  /// flagged approximate for custom generators.
  static ConjugateGenerator numeric(const GeneratorSpec& spec, std::vector<double> gamma_grid,
                                    std::span<const double> a_scan);

  ExtReal operator()(double t, double x, double y, double z, double a) const {
    return evaluator_(t, x, y, z, a);
  }

  const GeneratorSpec& base() const { return base_; }
  const Interval& a_domain() const { return a_domain_; }

 private:
  GeneratorSpec base_;
  Interval a_domain_;
  ConjugateEvaluator evaluator_;
};

/// Interval on which F is finite.
Interval domain_DF(const ConjugateGenerator& conj);

class BiconjugateGenerator {
 public:
  BiconjugateGenerator(GeneratorEvaluator evaluator, Interval gamma_domain)
      : evaluator_(std::move(evaluator)), gamma_domain_(gamma_domain) {}

  /// Closed-form biconjugate of a built-in generator.
  static BiconjugateGenerator closed_form(const GeneratorSpec& spec);

  /// Biconjugate computed from `conj` by maximisation over `a_grid`.
  static BiconjugateGenerator numeric(ConjugateGenerator conj, std::vector<double> a_grid);

  ExtReal operator()(double t, double x, double y, double z, double gamma) const {
    return evaluator_(t, x, y, z, gamma);
  }
  const Interval& gamma_domain() const { return gamma_domain_; }

 private:
  GeneratorEvaluator evaluator_;
  Interval gamma_domain_;
};

/// hhat(gamma) = max over a_grid of { a*gamma/2 - F(a) }. Reports unbounded when
/// the maximand still increases at the largest finite grid point and D_F extends
/// beyond it.
ExtReal biconjugate(const ConjugateGenerator& conj, double t, double x, double y, double z,
                    double gamma, std::span<const double> a_grid,
                    double slope_threshold = kUnboundedSlope);

/// Lipschitz constant of F in y, estimated by finite differences on a probe grid
/// of (y, z) values at the given variance rates.
double estimate_lipschitz_y(const ConjugateGenerator& conj, std::span<const double> a_values,
                            double x_probe = 0.0);

std::vector<double> linspace(double lo, double hi, std::size_t n);
std::vector<double> logspace(double lo, double hi, std::size_t n);

}  // namespace twobsde
