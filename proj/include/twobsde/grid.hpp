#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace twobsde {

/// Uniform partition of the horizon [0, 1]: t_k = k / n_steps.
class TimeGrid {
 public:
  explicit TimeGrid(int n_steps);

  int n_steps() const { return n_steps_; }
  double dt() const { return 1.0 / n_steps_; }
  double t(int k) const { return k == n_steps_ ? 1.0 : static_cast<double>(k) / n_steps_; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  int n_steps_;
};

/// Uniform spatial grid symmetric about `center` with an odd number of nodes.
class SpaceGrid {
 public:
  SpaceGrid(double center, double half_width, int n_points);

  double center() const { return center_; }
  double half_width() const { return half_width_; }
  std::size_t size() const { return static_cast<std::size_t>(n_points_); }
  double dx() const { return dx_; }
  double x(std::size_t j) const;
  double front() const { return center_ - half_width_; }
  double back() const { return center_ + half_width_; }
  std::vector<double> nodes() const;

  friend bool operator==(const SpaceGrid&, const SpaceGrid&) = default;

 private:
  double center_;
  double half_width_;
  int n_points_;
  double dx_;
};

/// Nodal values v(x_j) on a SpaceGrid, read between nodes by piecewise-linear
/// interpolation and outside the grid by extending the boundary segments.
class ValueSurface {
 public:
  ValueSurface(SpaceGrid grid, std::vector<double> values);
  explicit ValueSurface(SpaceGrid grid);

  static ValueSurface from_function(const SpaceGrid& grid, const std::function<double(double)>& f);

  const SpaceGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  double& operator[](std::size_t j) { return values_[j]; }

  double interpolate(double x) const;
  /// Interpolated value at fractional node coordinate u = (x - x_0) / dx.
  double at_coordinate(double u) const;

 private:
  SpaceGrid grid_;
  std::vector<double> values_;
};

/// Gauss-Hermite rule for E[phi(xi)], xi ~ N(0, 1).
class QuadratureRule {
 public:
  static QuadratureRule gauss_hermite(int n_nodes = 16);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

 private:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
      : nodes_(std::move(nodes)), weights_(std::move(weights)) {}

  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Node offsets (in units of dx) and weights of one conditional-expectation step
/// under variance rate a over a time step dt.
struct ExpectationStencil {
  std::vector<double> offsets;
  std::span<const double> weights;
};

ExpectationStencil make_stencil(double a, double dt, const QuadratureRule& quad, double dx);

/// E[v(x_j + sqrt(a dt) xi)] at a single node.
double expectation_at(const ValueSurface& surface, std::size_t j, const ExpectationStencil& stencil);

/// One-step conditional expectation at every node. Throws DomainError unless
/// a > 0 and dt > 0.
ValueSurface one_step_expectation(const ValueSurface& surface, double a, double dt,
                                  const QuadratureRule& quad);
ValueSurface one_step_expectation(const ValueSurface& surface, const ExpectationStencil& stencil);

/// Central differences inside, one-sided at the two edges.
double first_derivative_at(std::span<const double> values, std::size_t j, double dx);
ValueSurface first_derivative(const ValueSurface& surface);

/// Three-point stencil inside; edge values copied from the neighbouring node.
double second_derivative_at(std::span<const double> values, std::size_t j, double dx);
ValueSurface second_derivative(const ValueSurface& surface);

/// CSV with header `x,value`, 17 significant digits.
void write_csv(std::ostream& os, const ValueSurface& surface);

}  // namespace twobsde
