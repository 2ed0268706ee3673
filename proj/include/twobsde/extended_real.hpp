#pragma once

#include <limits>
#include <ostream>

namespace twobsde {

/// A real number or +infinity. Generators and their conjugates take values in
/// R u {+inf}; the flag keeps domain boundaries explicit instead of relying on
/// IEEE infinities leaking into arithmetic.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal unbounded() {
    ExtReal r;
    r.unbounded_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !unbounded_; }
  constexpr bool is_unbounded() const { return unbounded_; }

  /// Finite value, or +inf when unbounded.
  constexpr double value() const {
    return unbounded_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend constexpr bool operator==(const ExtReal& l, const ExtReal& r) {
    return l.unbounded_ == r.unbounded_ && (l.unbounded_ || l.value_ == r.value_);
  }
  friend constexpr bool operator<(const ExtReal& l, const ExtReal& r) {
    if (l.unbounded_) return false;
    if (r.unbounded_) return true;
    return l.value_ < r.value_;
  }
  friend constexpr bool operator<=(const ExtReal& l, const ExtReal& r) { return !(r < l); }

  friend constexpr ExtReal operator+(const ExtReal& l, double r) {
    return l.unbounded_ ? l : ExtReal(l.value_ + r);
  }
  friend constexpr ExtReal operator-(const ExtReal& l, double r) {
    return l.unbounded_ ? l : ExtReal(l.value_ - r);
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& r) {
    if (r.unbounded_) return os << "inf";
    return os << r.value_;
  }

 private:
  double value_ = 0.0;
  bool unbounded_ = false;
};

}  // namespace twobsde
