#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace edge {

// Error taxonomy. The CLI maps these onto distinct exit codes:
// InvalidInputError -> 2, ConfigError -> 3, NumericError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInputError : Error {
  using Error::Error;
};

struct EmptyInputError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

// Snapshot / file decoding failures.
struct DecodeError : InvalidInputError {
  using InvalidInputError::InvalidInputError;
};

struct ConfigError : Error {
  using Error::Error;
};

struct InfeasibleConfigError : ConfigError {
  using ConfigError::ConfigError;
};

struct ConditioningError : ConfigError {
  using ConfigError::ConfigError;
};

struct NumericError : Error {
  using Error::Error;
};

// SplitMix64 finalizer. Bijective on 64-bit words; used for seeding,
// sub-stream derivation and the H2 bucket mixer. Fixed by algorithm so
// results reproduce across platforms and releases.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent sub-seed from a master seed and a salt.
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  return mix64(seed ^ mix64(salt));
}

// Neumaier-compensated accumulator. Incremental sums in the online
// estimator must stay well below the 1e-9 batch-equivalence tolerance
// over arbitrarily many pushes.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double v) : sum_(v) {}

  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + comp_; }

  // Raw parts, exposed so online snapshots restore bit-exactly.
  double raw_sum() const noexcept { return sum_; }
  double raw_compensation() const noexcept { return comp_; }
  static CompensatedSum from_parts(double sum, double comp) noexcept {
    CompensatedSum s;
    s.sum_ = sum;
    s.comp_ = comp;
    return s;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace edge
