#include "twobsde/payoff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twobsde/errors.hpp"

namespace twobsde {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

std::string label(const std::string& head, std::initializer_list<double> args) {
  std::ostringstream os;
  os << head << '(';
  bool first = true;
  for (double a : args) {
    if (!first) os << ',';
    os << a;
    first = false;
  }
  os << ')';
  return os.str();
}

}  // namespace

Payoff Payoff::call(double k) {
  return {label("call", {k}), [k](double x) { return pos(x - k); }};
}

Payoff Payoff::put(double k) {
  return {label("put", {k}), [k](double x) { return pos(k - x); }};
}

Payoff Payoff::callspread(double k1, double k2) {
  if (!(k1 < k2)) throw DomainError("callspread requires k1 < k2");
  return {label("callspread", {k1, k2}), [k1, k2](double x) { return pos(x - k1) - pos(x - k2); }};
}

Payoff Payoff::abs() {
  return {"abs", [](double x) { return std::abs(x); }};
}

Payoff Payoff::square() {
  return {"square", [](double x) { return x * x; }};
}

Payoff Payoff::neg_square() {
  return {"neg_square", [](double x) { return -x * x; }};
}

Payoff Payoff::linear(double beta) {
  return {label("linear", {beta}), [beta](double x) { return beta * x; }};
}

Payoff Payoff::butterfly(double k, double w) {
  if (!(w > 0.0)) throw DomainError("butterfly requires a positive wing");
  return {label("butterfly", {k, w}),
          [k, w](double x) { return pos(x - (k - w)) - 2.0 * pos(x - k) + pos(x - (k + w)); }};
}

Payoff Payoff::constant(double c) {
  return {label("constant", {c}), [c](double) { return c; }};
}

Payoff Payoff::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() < 2 || xs.size() != ys.size())
    throw DomainError("payoff table needs at least two (x, y) pairs of equal length");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw DomainError("payoff table abscissae must increase");
  return {"table", [xs = std::move(xs), ys = std::move(ys)](double x) {
            auto it = std::upper_bound(xs.begin(), xs.end(), x);
            std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
            i = std::min(i, xs.size() - 2);
            const double slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            return ys[i] + slope * (x - xs[i]);
          }};
}

}  // namespace twobsde
