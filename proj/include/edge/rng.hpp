#pragma once

#include <cstdint>
#include <utility>

#include "edge/common.hpp"

namespace edge {

// Counter-based pseudo-random stream, specified by algorithm:
//
//   bits(i) = mix64(key + i * 0x9e3779b97f4a7c15)   with key = mix64(seed ^ mix64(stream))
//
// i.e. the SplitMix64 sequence addressed by counter. Uniforms take the top
// 53 bits; normals use Box-Muller on two consecutive counters. Pure given
// (seed, stream, counter), so sub-streams parallelize with a deterministic
// combination and the same numbers reproduce in any implementation.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed ^ mix64(stream))) {}

  std::uint64_t bits_at(std::uint64_t counter) const noexcept {
    return mix64(key_ + counter * 0x9e3779b97f4a7c15ULL);
  }

  // Uniform on (0,1): (top53 + 0.5) / 2^53, never exactly 0 or 1.
  double uniform_at(std::uint64_t counter) const noexcept {
    return (static_cast<double>(bits_at(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Stateful convenience over the same counter stream.
  std::uint64_t bits() noexcept { return bits_at(next_++); }
  double uniform() noexcept { return uniform_at(next_++); }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes two counters per pair.
  std::pair<double, double> gaussian_pair() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  double gaussian() noexcept {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    auto [g1, g2] = gaussian_pair();
    cached_ = g2;
    have_cached_ = true;
    return g1;
  }

  // Standard Cauchy: tan(pi * (u - 1/2)).
  double cauchy() noexcept {
    return std::tan(3.14159265358979323846 * (uniform() - 0.5));
  }

  std::uint64_t counter() const noexcept { return next_; }

 private:
  std::uint64_t key_;
  std::uint64_t next_ = 0;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace edge
