#pragma once

#include <array>
#include <cstdint>

namespace twobsde {

/// Philox4x32-10 counter-based generator: the output is a pure function of
/// (key, counter), so any path/step can be drawn independently of the others.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const;

 private:
  std::array<std::uint32_t, 2> key_;
};

/// Uniform in (0, 1) from 64 random bits; never returns 0 or 1.
double bits_to_open_uniform(std::uint64_t bits);

/// Standard normal quantile (Wichura's AS241, relative accuracy ~1e-16).
double inverse_normal_cdf(double p);

/// Two independent standard normal draws for (stream, index).
std::array<double, 2> normal_pair(const Philox4x32& gen, std::uint64_t stream, std::uint32_t index);

}  // namespace twobsde
