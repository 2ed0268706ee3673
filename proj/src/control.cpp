#include "twobsde/control.hpp"

#include <algorithm>
#include <sstream>

#include "twobsde/errors.hpp"

namespace twobsde {

ControlScenario ControlScenario::constant(double a) {
  if (!(a > 0.0)) throw DomainError("control values must be positive variance rates");
  return ControlScenario(Constant{a});
}

ControlScenario ControlScenario::piecewise(std::vector<double> breakpoints,
                                           std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1)
    throw DomainError("piecewise control needs one more value than breakpoints");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > 0.0 && breakpoints[i] < 1.0))
      throw DomainError("piecewise breakpoints must lie in (0, 1)");
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
      throw DomainError("piecewise breakpoints must increase");
  }
  for (double v : values)
    if (!(v > 0.0)) throw DomainError("control values must be positive variance rates");
  return ControlScenario(PiecewiseConstant{std::move(breakpoints), std::move(values)});
}

ControlScenario ControlScenario::feedback(std::vector<std::vector<double>> table) {
  if (table.empty()) throw DomainError("feedback control table is empty");
  for (const auto& row : table)
    for (double v : row)
      if (!(v > 0.0)) throw DomainError("control values must be positive variance rates");
  return ControlScenario(Feedback{std::move(table)});
}

double ControlScenario::at(int k, double t, std::size_t j) const {
  if (const auto* c = std::get_if<Constant>(&kind_)) return c->a;
  if (const auto* p = std::get_if<PiecewiseConstant>(&kind_)) {
    const auto it = std::upper_bound(p->breakpoints.begin(), p->breakpoints.end(), t);
    return p->values[static_cast<std::size_t>(it - p->breakpoints.begin())];
  }
  const auto& f = std::get<Feedback>(kind_);
  return f.table[static_cast<std::size_t>(k)][j];
}

std::vector<double> ControlScenario::distinct_values() const {
  std::vector<double> out;
  if (const auto* c = std::get_if<Constant>(&kind_)) {
    out.push_back(c->a);
  } else if (const auto* p = std::get_if<PiecewiseConstant>(&kind_)) {
    out = p->values;
  } else {
    for (const auto& row : std::get<Feedback>(kind_).table) out.insert(out.end(), row.begin(), row.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void ControlScenario::validate(const Interval& domain, const TimeGrid& tg,
                               const SpaceGrid& sg) const {
  if (const auto* f = std::get_if<Feedback>(&kind_)) {
    if (f->table.size() != static_cast<std::size_t>(tg.n_steps()))
      throw DomainError("feedback table has " + std::to_string(f->table.size()) +
                        " rows, lattice has " + std::to_string(tg.n_steps()) + " steps");
    for (const auto& row : f->table)
      if (row.size() != sg.size())
        throw DomainError("feedback table row does not match the number of space nodes");
  }
  for (double v : distinct_values()) {
    if (!domain.contains(v)) {
      std::ostringstream os;
      os << "control " << label() << " takes value " << v << " outside D_F "
         << domain.to_string();
      throw DomainError(os.str());
    }
  }
}

std::string ControlScenario::label() const {
  if (!label_.empty()) return label_;
  std::ostringstream os;
  if (const auto* c = std::get_if<Constant>(&kind_)) {
    os << "constant_" << c->a;
  } else if (std::holds_alternative<PiecewiseConstant>(kind_)) {
    os << "piecewise";
  } else {
    os << "feedback";
  }
  return os.str();
}

ControlGrid::ControlGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("control grid is empty");
  std::sort(values_.begin(), values_.end());
  values_.erase(std::unique(values_.begin(), values_.end()), values_.end());
  if (!(values_.front() > 0.0)) throw DomainError("control grid values must be positive");
}

ControlGrid ControlGrid::uniform(double lo, double hi, std::size_t n) {
  if (n == 0) throw DomainError("control grid is empty");
  return ControlGrid(linspace(lo, hi, n));
}

void ControlGrid::validate(const Interval& domain) const {
  for (double a : values_) {
    if (!domain.contains(a)) {
      std::ostringstream os;
      os << "control grid value " << a << " lies outside D_F " << domain.to_string();
      throw DomainError(os.str());
    }
  }
  if (domain.bounded() && !domain.approximate &&
      (values_.front() != domain.lo || values_.back() != domain.hi)) {
    throw DomainError("control grid must contain both endpoints of the bounded domain " +
                      domain.to_string());
  }
}

}  // namespace twobsde
