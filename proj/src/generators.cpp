#include "twobsde/generators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twobsde/errors.hpp"

namespace twobsde {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }
double negative_part(double v) { return v < 0.0 ? -v : 0.0; }

}  // namespace

bool Interval::contains(double v) const {
  if (std::isnan(v)) return false;
  const bool above_lo = lo_open ? v > lo : v >= lo;
  const bool below_hi = hi_open ? v < hi : v <= hi;
  return above_lo && below_hi;
}

bool Interval::bounded() const {
  return std::isfinite(lo) && std::isfinite(hi);
}

std::string Interval::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (is_point()) {
    os << "{" << lo << "}";
  } else {
    os << (lo_open ? "(" : "[") << lo << "," << hi << (hi_open ? ")" : "]");
  }
  if (approximate) os << "~";
  return os.str();
}

GeneratorSpec::GeneratorSpec(GeneratorKind kind, Reaction reaction)
    : kind_(std::move(kind)), reaction_(std::move(reaction)) {
  std::visit(overloaded{
                 [](const SingleVol& k) {
                   if (!(k.a0 > 0.0)) throw DomainError("SingleVol requires a0 > 0");
                 },
                 [](const GRange& k) {
                   if (!(k.a_lo > 0.0 && k.a_lo <= k.a_hi))
                     throw DomainError("GRange requires 0 < a_lo <= a_hi");
                 },
                 [](const GammaBand& k) {
                   if (!(k.gamma_lo < 0.0 && 0.0 < k.gamma_hi))
                     throw DomainError("GammaBand requires gamma_lo < 0 < gamma_hi");
                 },
                 [](const CustomGenerator& k) {
                   if (!k.evaluator) throw DomainError("custom generator needs an evaluator");
                   if (!k.gamma_domain.contains(0.0))
                     throw DomainError("generator domain must contain 0");
                 },
             },
             kind_);
}

GeneratorSpec GeneratorSpec::single_vol(double a0, Reaction reaction) {
  return GeneratorSpec(SingleVol{a0}, std::move(reaction));
}
GeneratorSpec GeneratorSpec::g_range(double a_lo, double a_hi, Reaction reaction) {
  return GeneratorSpec(GRange{a_lo, a_hi}, std::move(reaction));
}
GeneratorSpec GeneratorSpec::gamma_band(double gamma_lo, double gamma_hi, Reaction reaction) {
  return GeneratorSpec(GammaBand{gamma_lo, gamma_hi}, std::move(reaction));
}
GeneratorSpec GeneratorSpec::custom(GeneratorEvaluator evaluator, Interval gamma_domain,
                                    Reaction reaction) {
  return GeneratorSpec(CustomGenerator{std::move(evaluator), gamma_domain},
                       std::move(reaction));
}

Interval GeneratorSpec::gamma_domain() const {
  return std::visit(overloaded{
                        [](const SingleVol&) { return Interval::real_line(); },
                        [](const GRange&) { return Interval::real_line(); },
                        [](const GammaBand& k) { return Interval::closed(k.gamma_lo, k.gamma_hi); },
                        [](const CustomGenerator& k) { return k.gamma_domain; },
                    },
                    kind_);
}

std::string GeneratorSpec::name() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const SingleVol& k) { os << "SingleVol(" << k.a0 << ")"; },
                 [&](const GRange& k) { os << "GRange(" << k.a_lo << "," << k.a_hi << ")"; },
                 [&](const GammaBand& k) {
                   os << "GammaBand(" << k.gamma_lo << "," << k.gamma_hi << ")";
                 },
                 [&](const CustomGenerator&) { os << "Custom"; },
             },
             kind_);
  return os.str();
}

ExtReal eval_H(const GeneratorSpec& spec, double t, double x, double y, double z,
               double gamma) {
  const ExtReal base = std::visit(
      overloaded{
          [&](const SingleVol& k) -> ExtReal { return 0.5 * k.a0 * gamma; },
          [&](const GRange& k) -> ExtReal {
            return 0.5 * std::max(k.a_lo * gamma, k.a_hi * gamma);
          },
          [&](const GammaBand& k) -> ExtReal {
            if (gamma < k.gamma_lo || gamma > k.gamma_hi) return ExtReal::unbounded();
            return 0.5 * gamma;
          },
          [&](const CustomGenerator& k) -> ExtReal {
            if (!k.gamma_domain.contains(gamma)) return ExtReal::unbounded();
            return k.evaluator(t, x, y, z, gamma);
          },
      },
      spec.kind());
  return base - spec.reaction_at(t, x, y, z);
}

ExtReal conjugate_closed(const GeneratorSpec& spec, double t, double x, double y, double z,
                         double a) {
  const ExtReal base = std::visit(
      overloaded{
          [&](const SingleVol& k) -> ExtReal {
            return a == k.a0 ? ExtReal(0.0) : ExtReal::unbounded();
          },
          [&](const GRange& k) -> ExtReal {
            return (a >= k.a_lo && a <= k.a_hi) ? ExtReal(0.0) : ExtReal::unbounded();
          },
          [&](const GammaBand& k) -> ExtReal {
            if (!(a > 0.0)) return ExtReal::unbounded();
            return 0.5 * (k.gamma_hi * positive_part(a - 1.0) -
                          k.gamma_lo * negative_part(a - 1.0));
          },
          [&](const CustomGenerator&) -> ExtReal {
            throw DomainError("closed-form conjugate is not available for custom generators");
          },
      },
      spec.kind());
  return base + spec.reaction_at(t, x, y, z);
}

ExtReal conjugate_numeric(const GeneratorSpec& spec, double t, double x, double y, double z,
                          double a, std::span<const double> gamma_grid,
                          double slope_threshold) {
  if (gamma_grid.empty()) throw DomainError("conjugate_numeric: empty curvature grid");

  std::vector<double> gammas;
  std::vector<double> values;
  gammas.reserve(gamma_grid.size());
  values.reserve(gamma_grid.size());
  for (double g : gamma_grid) {
    const ExtReal h = eval_H(spec, t, x, y, z, g);
    if (h.is_unbounded()) continue;
    gammas.push_back(g);
    values.push_back(0.5 * a * g - h.value());
  }
  if (values.empty()) throw DomainError("conjugate_numeric: grid does not meet D_H");

  const Interval domain = spec.gamma_domain();
  if (values.size() >= 2) {
    const std::size_t n = values.size();
    const double left_growth = (values[0] - values[1]) / (gammas[1] - gammas[0]);
    const double right_growth = (values[n - 1] - values[n - 2]) / (gammas[n - 1] - gammas[n - 2]);
    if (domain.extends_below(gammas.front()) && left_growth > slope_threshold)
      return ExtReal::unbounded();
    if (domain.extends_above(gammas.back()) && right_growth > slope_threshold)
      return ExtReal::unbounded();
  }
  return *std::max_element(values.begin(), values.end());
}

ConjugateGenerator::ConjugateGenerator(GeneratorSpec base, Interval a_domain,
                                       ConjugateEvaluator evaluator)
    : base_(std::move(base)), a_domain_(a_domain), evaluator_(std::move(evaluator)) {}

ConjugateGenerator ConjugateGenerator::closed_form(const GeneratorSpec& spec) {
  Interval domain = std::visit(
      overloaded{
          [](const SingleVol& k) { return Interval::point(k.a0); },
          [](const GRange& k) { return Interval::closed(k.a_lo, k.a_hi); },
          [](const GammaBand&) { return Interval::positive_reals(); },
          [](const CustomGenerator&) -> Interval {
            throw DomainError("closed-form conjugate is not available for custom generators");
          },
      },
      spec.kind());
  return ConjugateGenerator(spec, domain,
                            [spec](double t, double x, double y, double z, double a) {
                              return conjugate_closed(spec, t, x, y, z, a);
                            });
}

ConjugateGenerator ConjugateGenerator::numeric(const GeneratorSpec& spec,
                                               std::vector<double> gamma_grid,
                                               std::span<const double> a_scan) {
  if (gamma_grid.empty()) throw DomainError("numeric conjugate: empty curvature grid");
  ConjugateEvaluator eval = [spec, grid = std::move(gamma_grid)](double t, double x, double y,
                                                                 double z, double a) {
    return conjugate_numeric(spec, t, x, y, z, a, grid);
  };

  Interval domain;
  if (spec.is_builtin()) {
    domain = closed_form(spec).a_domain();
  } else {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double a : a_scan) {
      if (!(a > 0.0)) continue;
      if (eval(0.0, 0.0, 0.0, 0.0, a).is_finite()) {
        lo = std::min(lo, a);
        hi = std::max(hi, a);
      }
    }
    if (lo > hi) throw DomainError("numeric conjugate: F is infinite on the whole a-scan");
    domain = Interval::closed(lo, hi);
    domain.approximate = true;
  }
  return ConjugateGenerator(spec, domain, std::move(eval));
}

Interval domain_DF(const ConjugateGenerator& conj) { return conj.a_domain(); }

BiconjugateGenerator BiconjugateGenerator::closed_form(const GeneratorSpec& spec) {
  Interval domain = std::visit(
      overloaded{
          [](const SingleVol&) { return Interval::real_line(); },
          [](const GRange&) { return Interval::real_line(); },
          [](const GammaBand& k) {
            return Interval{-std::numeric_limits<double>::infinity(), k.gamma_hi, false, false,
                            false};
          },
          [](const CustomGenerator&) -> Interval {
            throw DomainError("closed-form biconjugate is not available for custom generators");
          },
      },
      spec.kind());
  GeneratorEvaluator eval = [spec](double t, double x, double y, double z,
                                   double gamma) -> ExtReal {
    const ExtReal base = std::visit(
        overloaded{
            [&](const SingleVol& k) -> ExtReal { return 0.5 * k.a0 * gamma; },
            [&](const GRange& k) -> ExtReal {
              return 0.5 * (k.a_hi * positive_part(gamma) - k.a_lo * negative_part(gamma));
            },
            [&](const GammaBand& k) -> ExtReal {
              if (gamma > k.gamma_hi) return ExtReal::unbounded();
              return 0.5 * std::max(gamma, k.gamma_lo);
            },
            [&](const CustomGenerator&) -> ExtReal { return ExtReal::unbounded(); },
        },
        spec.kind());
    return base - spec.reaction_at(t, x, y, z);
  };
  return BiconjugateGenerator(std::move(eval), domain);
}

BiconjugateGenerator BiconjugateGenerator::numeric(ConjugateGenerator conj,
                                                   std::vector<double> a_grid) {
  if (a_grid.empty()) throw DomainError("numeric biconjugate: empty a-grid");
  // The domain is whatever gamma values the evaluator reports as finite; it is
  // not known in closed form here.
  Interval domain = Interval::real_line();
  domain.approximate = true;
  GeneratorEvaluator eval = [conj = std::move(conj), grid = std::move(a_grid)](
                                double t, double x, double y, double z, double gamma) {
    return biconjugate(conj, t, x, y, z, gamma, grid);
  };
  return BiconjugateGenerator(std::move(eval), domain);
}

ExtReal biconjugate(const ConjugateGenerator& conj, double t, double x, double y, double z,
                    double gamma, std::span<const double> a_grid, double slope_threshold) {
  if (a_grid.empty()) throw DomainError("biconjugate: empty a-grid");

  std::vector<double> as;
  std::vector<double> values;
  for (double a : a_grid) {
    if (!(a > 0.0)) throw DomainError("biconjugate: a-grid must lie in (0, inf)");
    const ExtReal f = conj(t, x, y, z, a);
    if (f.is_unbounded()) continue;
    as.push_back(a);
    values.push_back(0.5 * a * gamma - f.value());
  }
  if (values.empty()) throw DomainError("biconjugate: F is infinite on the whole a-grid");

  const std::size_t n = values.size();
  if (n >= 2 && conj.a_domain().extends_above(as.back())) {
    const double growth = (values[n - 1] - values[n - 2]) / (as[n - 1] - as[n - 2]);
    if (growth > slope_threshold) return ExtReal::unbounded();
  }
  return *std::max_element(values.begin(), values.end());
}

double estimate_lipschitz_y(const ConjugateGenerator& conj, std::span<const double> a_values,
                            double x_probe) {
  const std::vector<double> ys = linspace(-10.0, 10.0, 41);
  const double zs[] = {-1.0, 0.0, 1.0};
  const double ts[] = {0.0, 0.5, 1.0};
  double lip = 0.0;
  for (double a : a_values) {
    for (double t : ts) {
      for (double z : zs) {
        ExtReal prev = conj(t, x_probe, ys[0], z, a);
        for (std::size_t i = 1; i < ys.size(); ++i) {
          const ExtReal cur = conj(t, x_probe, ys[i], z, a);
          if (prev.is_unbounded() || cur.is_unbounded()) {
            std::ostringstream os;
            os << "variance rate " << a << " lies outside D_F " << conj.a_domain().to_string();
            throw DomainError(os.str());
          }
          lip = std::max(lip, std::abs(cur.value() - prev.value()) / (ys[i] - ys[i - 1]));
          prev = cur;
        }
      }
    }
  }
  return lip;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out[n - 1] = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> out = linspace(std::log(lo), std::log(hi), n);
  for (double& v : out) v = std::exp(v);
  if (n > 0) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

}  // namespace twobsde
