#pragma once

#include <stdexcept>
#include <string>

namespace twobsde {

/// Parameter or payload outside the admissible domain (maps to CLI exit code 4).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time step violates the explicit-scheme stability bound (CLI exit code 3).
class StabilityError : public std::runtime_error {
 public:
  StabilityError(const std::string& what, double admissible_dt)
      : std::runtime_error(what), admissible_dt_(admissible_dt) {}

  double admissible_dt() const noexcept { return admissible_dt_; }

 private:
  double admissible_dt_;
};

/// Malformed or out-of-range run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace twobsde
