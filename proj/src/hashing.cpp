#include "edge/hashing.hpp"

#include <algorithm>
#include <cmath>

#include "edge/rng.hpp"

namespace edge {

namespace {

constexpr std::uint64_t kShiftSalt = 0x5b1f0cafULL;
constexpr std::uint64_t kProjectionSalt = 0x9137e21bULL;

// floor((x + b) / eps) can exceed the int64 range for extreme x/eps
// combinations; 2^62 leaves headroom for later mixing.
constexpr double kMaxBucketIndex = 4.611686018427387904e18;

}  // namespace

HashConfig HashConfig::for_batch(double epsilon, std::int64_t n, std::uint64_t shift_seed,
                                 std::uint64_t bucket_seed, HashMode mode, int c_h) {
  if (n < 1) throw EmptyInputError("hash config: batch size must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInputError("hash config: epsilon must be positive and finite");
  }
  if (c_h < 1) throw ConfigError("hash config: c_h must be a positive integer");
  HashConfig cfg;
  cfg.epsilon = epsilon;
  cfg.shift_b = CounterRng(sub_seed(shift_seed, kShiftSalt)).uniform() * epsilon;
  cfg.c_h = c_h;
  cfg.f_buckets = static_cast<std::int64_t>(c_h) * n;
  cfg.seed = bucket_seed;
  cfg.mode = mode;
  cfg.validate();
  return cfg;
}

std::pair<HashConfig, HashConfig> make_xy_configs(double epsilon, std::int64_t n,
                                                  std::uint64_t seed, HashMode mode, int c_h) {
  HashConfig cx = HashConfig::for_batch(epsilon, n, seed, sub_seed(seed, 0x58), mode, c_h);
  HashConfig cy = HashConfig::for_batch(epsilon, n, seed, sub_seed(seed, 0x59), mode, c_h);
  return {cx, cy};
}

void HashConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInputError("hash config: epsilon must be positive and finite");
  }
  if (!(shift_b >= 0.0) || shift_b > epsilon) {
    throw InvalidInputError("hash config: shift b must lie in [0, epsilon]");
  }
  if (f_buckets < 1) throw ConfigError("hash config: f_buckets must be >= 1");
  if (mode == HashMode::kPStable && projection_dim < 0) {
    throw ConfigError("hash config: projection dim must be >= 0");
  }
}

std::int64_t h1_scalar(double x, double epsilon, double b) {
  if (!std::isfinite(x)) throw InvalidInputError("h1: input must be finite");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInputError("h1: epsilon must be positive and finite");
  }
  if (!std::isfinite(b)) throw InvalidInputError("h1: shift must be finite");
  const double q = std::floor((x + b) / epsilon);
  if (std::abs(q) >= kMaxBucketIndex) {
    throw NumericError("h1: bucket index overflows 64-bit range");
  }
  return static_cast<std::int64_t>(q);
}

std::vector<std::int64_t> h1_vector(Eigen::Ref<const Eigen::VectorXd> x,
                                    const HashConfig& config) {
  if (x.size() < 1) throw InvalidInputError("h1: empty vector");
  std::vector<std::int64_t> out(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out[static_cast<std::size_t>(i)] = h1_scalar(x[i], config.epsilon, config.shift_b);
  }
  return out;
}

std::int64_t h2_bucket(std::span<const std::int64_t> z, std::int64_t f_buckets,
                       std::uint64_t seed) {
  if (f_buckets < 1) throw ConfigError("h2: f_buckets must be >= 1");
  std::uint64_t h = mix64(seed);
  for (std::int64_t c : z) h = mix64(h ^ static_cast<std::uint64_t>(c));
  return static_cast<std::int64_t>(h % static_cast<std::uint64_t>(f_buckets)) + 1;
}

PointHasher::PointHasher(HashConfig config, Eigen::Index dim)
    : config_(std::move(config)), dim_(dim) {
  config_.validate();
  if (dim_ < 1) throw InvalidInputError("hasher: dimension must be >= 1");
  if (config_.mode == HashMode::kPStable) {
    const Eigen::Index r = config_.projection_dim > 0
                               ? config_.projection_dim
                               : std::min<Eigen::Index>(dim_, 8);
    projection_.resize(dim_, r);
    CounterRng rng(sub_seed(config_.seed, kProjectionSalt));
    for (Eigen::Index j = 0; j < r; ++j) {
      for (Eigen::Index i = 0; i < dim_; ++i) {
        projection_(i, j) =
            config_.law == StableLaw::kGaussian ? rng.gaussian() : rng.cauchy();
      }
    }
  }
}

BucketId PointHasher::operator()(Eigen::Ref<const Eigen::VectorXd> x) const {
  if (x.size() != dim_) {
    throw InvalidInputError("hasher: input dimension does not match the fixed dimension");
  }
  switch (config_.mode) {
    case HashMode::kExactBucket: {
      return BucketId::key(h1_vector(x, config_));
    }
    case HashMode::kFloor: {
      // H2(H1(x)) streamed per coordinate; matches h2_bucket(h1_vector(x)).
      std::uint64_t h = mix64(config_.seed);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const std::int64_t c = h1_scalar(x[i], config_.epsilon, config_.shift_b);
        h = mix64(h ^ static_cast<std::uint64_t>(c));
      }
      return BucketId::bucket(
          static_cast<std::int64_t>(h % static_cast<std::uint64_t>(config_.f_buckets)) + 1);
    }
    case HashMode::kPStable: {
      Eigen::VectorXd projected = projection_.transpose() * x.matrix();
      std::uint64_t h = mix64(config_.seed);
      for (Eigen::Index i = 0; i < projected.size(); ++i) {
        const std::int64_t c = h1_scalar(projected[i], config_.epsilon, config_.shift_b);
        h = mix64(h ^ static_cast<std::uint64_t>(c));
      }
      return BucketId::bucket(
          static_cast<std::int64_t>(h % static_cast<std::uint64_t>(config_.f_buckets)) + 1);
    }
  }
  throw ConfigError("hasher: unknown mode");
}

BucketId hash_point(Eigen::Ref<const Eigen::VectorXd> x, const HashConfig& config) {
  return PointHasher(config, x.size())(x);
}

}  // namespace edge
