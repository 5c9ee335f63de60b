#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>

#include "edge/common.hpp"

namespace edge {

// X ~ N(0, I_d), Y = X + a * U with U uniform on [0,1]^d.
struct GaussNoise {
  int dim = 2;
  double noise_scale = 0.2;
};

// X uniform on {1..k} (one column), Y | X=x ~ N([x/2, 0, ..., 0], I_{d_y}).
struct DiscreteGaussMix {
  int atoms = 4;
  int y_dim = 4;
};

using SyntheticFamily = std::variant<GaussNoise, DiscreteGaussMix>;

struct SampleBatch {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
};

SampleBatch generate(const SyntheticFamily& family, std::int64_t n, std::uint64_t seed);

struct OracleValue {
  double value;        // nats
  double error_bound;  // <= 1e-3 with default settings
};

struct OracleOptions {
  std::int64_t mc_samples = 16'000'000;  // GaussNoise entropy Monte-Carlo
  std::uint64_t seed = 0x0eac1e;
  unsigned threads = 0;  // 0 -> hardware
};

// Ground-truth MI, deliberately independent of the hashing code path:
// GaussNoise via exact-density entropy Monte-Carlo, DiscreteGaussMix via
// 1-d adaptive quadrature on the first-coordinate mixture marginal.
OracleValue oracle_mi(const SyntheticFamily& family, const OracleOptions& options = {});

}  // namespace edge
