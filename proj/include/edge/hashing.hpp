#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "edge/common.hpp"

namespace edge {

enum class HashMode { kFloor, kPStable, kExactBucket };
enum class StableLaw { kGaussian, kCauchy };

inline constexpr int kDefaultBucketFactor = 4;  // c_H, F = c_H * N

// Configuration of the combined hash H = H2 o H1.
//
// epsilon is the bin width of the scalar floor hash, shift_b the shared
// random offset in [0, epsilon], f_buckets the H2 range F. In kFloor and
// kPStable modes F = c_h * N for the batch the config serves. kExactBucket
// skips H2 and keys buckets on the raw H1 integer vector (no H2 collisions,
// enables exact hand-computed oracles).
struct HashConfig {
  double epsilon = 1.0;
  double shift_b = 0.0;
  std::int64_t f_buckets = 1;
  int c_h = kDefaultBucketFactor;
  std::uint64_t seed = 0;
  HashMode mode = HashMode::kFloor;
  int projection_dim = 0;  // p-stable r; 0 means min(d, 8) at hasher construction
  StableLaw law = StableLaw::kGaussian;

  // Derives the per-batch config: F = c_h * n, b = u * epsilon with
  // u ~ U[0,1) drawn from `shift_seed` (one scalar per estimator instance,
  // shared across dimensions and across the X/Y sides).
  static HashConfig for_batch(double epsilon, std::int64_t n, std::uint64_t shift_seed,
                              std::uint64_t bucket_seed, HashMode mode,
                              int c_h = kDefaultBucketFactor);

  void validate() const;  // throws InvalidInputError / ConfigError
};

// X and Y side configs sharing epsilon and shift b but with independent
// H2 seeds, all derived from one master seed.
std::pair<HashConfig, HashConfig> make_xy_configs(double epsilon, std::int64_t n,
                                                  std::uint64_t seed, HashMode mode,
                                                  int c_h = kDefaultBucketFactor);

// Bucket identifier: either a post-H2 id in {1..F} or, in exact-bucket
// mode, the raw H1 integer vector.
class BucketId {
 public:
  BucketId() = default;

  static BucketId bucket(std::int64_t id) {
    BucketId b;
    b.value_ = id;
    return b;
  }
  static BucketId key(std::vector<std::int64_t> coords) {
    BucketId b;
    b.coords_ = std::move(coords);
    b.value_ = -1;
    return b;
  }

  bool is_bucket() const noexcept { return coords_.empty(); }
  std::int64_t bucket_value() const noexcept { return value_; }
  std::span<const std::int64_t> coords() const noexcept { return coords_; }

  friend bool operator==(const BucketId& a, const BucketId& b) noexcept {
    return a.value_ == b.value_ && a.coords_ == b.coords_;
  }

  std::uint64_t hash() const noexcept {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(value_));
    for (std::int64_t c : coords_) h = mix64(h ^ static_cast<std::uint64_t>(c));
    return h;
  }

 private:
  std::int64_t value_ = 0;
  std::vector<std::int64_t> coords_;
};

struct BucketIdHash {
  std::size_t operator()(const BucketId& b) const noexcept {
    return static_cast<std::size_t>(b.hash());
  }
};

// Scalar floor hash h1(x) = floor((x + b) / epsilon).
std::int64_t h1_scalar(double x, double epsilon, double b);

// Componentwise h1 with shared (epsilon, b).
std::vector<std::int64_t> h1_vector(Eigen::Ref<const Eigen::VectorXd> x,
                                    const HashConfig& config);

// Seeded uniform bucket hash H2: Z^d -> {1..F}. Deterministic given seed;
// approximately uniform over the range.
std::int64_t h2_bucket(std::span<const std::int64_t> z, std::int64_t f_buckets,
                       std::uint64_t seed);

// Fixes the input dimension and precomputes the p-stable projection, so a
// batch pass costs O(d) per point. Pure and thread-safe once constructed.
class PointHasher {
 public:
  PointHasher(HashConfig config, Eigen::Index dim);

  BucketId operator()(Eigen::Ref<const Eigen::VectorXd> x) const;

  const HashConfig& config() const noexcept { return config_; }
  Eigen::Index dim() const noexcept { return dim_; }

 private:
  HashConfig config_;
  Eigen::Index dim_;
  Eigen::MatrixXd projection_;  // d x r, kPStable only
};

// Combined hash of a single point (convenience over PointHasher).
BucketId hash_point(Eigen::Ref<const Eigen::VectorXd> x, const HashConfig& config);

}  // namespace edge
