#include "twobsde/grid.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "twobsde/errors.hpp"

namespace twobsde {

TimeGrid::TimeGrid(int n_steps) : n_steps_(n_steps) {
  if (n_steps <= 0) throw DomainError("TimeGrid requires n_steps > 0");
}

SpaceGrid::SpaceGrid(double center, double half_width, int n_points)
    : center_(center), half_width_(half_width), n_points_(n_points), dx_(0.0) {
  if (!(half_width > 0.0)) throw DomainError("SpaceGrid requires half_width > 0");
  if (n_points < 3 || n_points % 2 == 0)
    throw DomainError("SpaceGrid requires an odd number of points >= 3");
  dx_ = 2.0 * half_width / (n_points - 1);
}

double SpaceGrid::x(std::size_t j) const {
  const auto mid = static_cast<std::ptrdiff_t>(n_points_ / 2);
  return center_ + static_cast<double>(static_cast<std::ptrdiff_t>(j) - mid) * dx_;
}

std::vector<double> SpaceGrid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = x(j);
  return out;
}

ValueSurface::ValueSurface(SpaceGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw DomainError("surface size does not match its grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw DomainError("surface values must be finite");
}

ValueSurface::ValueSurface(SpaceGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

ValueSurface ValueSurface::from_function(const SpaceGrid& grid,
                                         const std::function<double(double)>& f) {
  std::vector<double> values(grid.size());
  for (std::size_t j = 0; j < values.size(); ++j) values[j] = f(grid.x(j));
  return ValueSurface(grid, std::move(values));
}

double ValueSurface::at_coordinate(double u) const {
  const auto last = static_cast<double>(values_.size() - 2);
  double cell = std::floor(u);
  if (cell < 0.0) cell = 0.0;
  if (cell > last) cell = last;
  const auto i = static_cast<std::size_t>(cell);
  const double theta = u - cell;
  return values_[i] + theta * (values_[i + 1] - values_[i]);
}

double ValueSurface::interpolate(double x) const {
  return at_coordinate((x - grid_.front()) / grid_.dx());
}

QuadratureRule QuadratureRule::gauss_hermite(int n_nodes) {
  if (n_nodes <= 0) throw DomainError("quadrature needs at least one node");
  const int n = n_nodes;
  // Roots of the physicists' Hermite polynomial H_n by Newton iteration on the
  // orthonormal recurrence, then rescaled to the standard normal weight.
  std::vector<double> roots(n);
  std::vector<double> wphys(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * roots[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * roots[1];
    else
      z = 2.0 * z - roots[i - 2];

    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    roots[i] = z;
    roots[n - 1 - i] = -z;
    wphys[i] = 2.0 / (pp * pp);
    wphys[n - 1 - i] = wphys[i];
  }
  if (n % 2 == 1) roots[n / 2] = 0.0;

  std::vector<double> nodes(n);
  std::vector<double> weights(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    // ascending order
    nodes[i] = std::numbers::sqrt2 * roots[n - 1 - i];
    weights[i] = wphys[n - 1 - i] / std::sqrt(std::numbers::pi);
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return QuadratureRule(std::move(nodes), std::move(weights));
}

ExpectationStencil make_stencil(double a, double dt, const QuadratureRule& quad, double dx) {
  if (!(a > 0.0)) throw DomainError("one-step expectation requires a > 0");
  if (!(dt > 0.0)) throw DomainError("one-step expectation requires dt > 0");
  const double scale = std::sqrt(a * dt) / dx;
  ExpectationStencil stencil{std::vector<double>(quad.size()), quad.weights()};
  const auto nodes = quad.nodes();
  for (std::size_t m = 0; m < nodes.size(); ++m) stencil.offsets[m] = scale * nodes[m];
  return stencil;
}

double expectation_at(const ValueSurface& surface, std::size_t j,
                      const ExpectationStencil& stencil) {
  // Accumulating deviations from the centre value keeps constants exact.
  const double centre = surface[j];
  const auto u0 = static_cast<double>(j);
  double acc = 0.0;
  for (std::size_t m = 0; m < stencil.offsets.size(); ++m)
    acc += stencil.weights[m] * (surface.at_coordinate(u0 + stencil.offsets[m]) - centre);
  return centre + acc;
}

ValueSurface one_step_expectation(const ValueSurface& surface, const ExpectationStencil& stencil) {
  ValueSurface out(surface.grid());
  for (std::size_t j = 0; j < surface.size(); ++j) out[j] = expectation_at(surface, j, stencil);
  return out;
}

ValueSurface one_step_expectation(const ValueSurface& surface, double a, double dt,
                                  const QuadratureRule& quad) {
  return one_step_expectation(surface, make_stencil(a, dt, quad, surface.grid().dx()));
}

double first_derivative_at(std::span<const double> v, std::size_t j, double dx) {
  const std::size_t n = v.size();
  if (j == 0) return (v[1] - v[0]) / dx;
  if (j == n - 1) return (v[n - 1] - v[n - 2]) / dx;
  return (v[j + 1] - v[j - 1]) / (2.0 * dx);
}

ValueSurface first_derivative(const ValueSurface& surface) {
  ValueSurface out(surface.grid());
  const double dx = surface.grid().dx();
  for (std::size_t j = 0; j < surface.size(); ++j)
    out[j] = first_derivative_at(surface.values(), j, dx);
  return out;
}

double second_derivative_at(std::span<const double> v, std::size_t j, double dx) {
  const std::size_t n = v.size();
  if (j == 0) j = 1;
  if (j == n - 1) j = n - 2;
  return (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (dx * dx);
}

ValueSurface second_derivative(const ValueSurface& surface) {
  ValueSurface out(surface.grid());
  const double dx = surface.grid().dx();
  for (std::size_t j = 0; j < surface.size(); ++j)
    out[j] = second_derivative_at(surface.values(), j, dx);
  return out;
}

void write_csv(std::ostream& os, const ValueSurface& surface) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "x,value\n";
  for (std::size_t j = 0; j < surface.size(); ++j)
    buf << surface.grid().x(j) << ',' << surface[j] << '\n';
  os << buf.str();
}

}  // namespace twobsde
