#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "edge/estimator.hpp"

namespace edge {

// Bandwidth refresh schedule n -> epsilon(n); a closed descriptor rather
// than a callable so snapshots can serialize it.
struct EpsilonSchedule {
  enum class Kind : std::uint32_t { kConstant = 0, kPowerLaw = 1 };
  Kind kind = Kind::kPowerLaw;
  double coefficient = 1.0;
  double exponent = 0.0;

  static EpsilonSchedule constant(double epsilon) {
    return EpsilonSchedule{Kind::kConstant, epsilon, 0.0};
  }
  static EpsilonSchedule power_law(double coefficient, double exponent) {
    return EpsilonSchedule{Kind::kPowerLaw, coefficient, exponent};
  }
  // Theorem-1 bias optimum for q >= 1: epsilon = n^{-1/(1+d)}.
  static EpsilonSchedule bias_optimal(int total_dim) {
    return power_law(1.0, -1.0 / (1.0 + total_dim));
  }

  double operator()(std::int64_t n) const;
};

// Streaming MI estimator. Each push updates the dependence graph counts
// (two nodes, one edge) and the running sums over edges incident to the
// touched nodes; epsilon refreshes with a full rebuild from the retained
// buffer whenever the sample count reaches a power of two, so updates are
// amortized O(1).
//
// Exactness: omega_ij couples every edge to the global N, so a running
// plain sum of edge terms cannot be maintained locally. Instead the
// N-separable core sums of the generator (see GeneratorFunction) are
// maintained; they are N-free per edge and combine with closed-form
// coefficients at query time. Generators without a separable form (total
// variation, custom), or configurations where clipping can bind, fall back
// to an exact full recomputation per estimate.
//
// Single writer; the retained buffer costs O(n*d) memory (rebuilds need
// the raw data).
class StreamState {
 public:
  StreamState(EpsilonSchedule schedule, GeneratorFunction g, std::uint64_t seed,
              HashMode mode = HashMode::kFloor, int c_h = kDefaultBucketFactor);

  // Returns the updated estimate.
  double push(Eigen::Ref<const Eigen::VectorXd> x, Eigen::Ref<const Eigen::VectorXd> y);

  double estimate() const;

  std::int64_t size() const noexcept { return n_; }
  std::int64_t rebuild_count() const noexcept { return rebuild_count_; }
  std::int64_t next_rebuild_at() const noexcept;
  double current_epsilon() const noexcept { return config_x_.epsilon; }
  const HashConfig& config_x() const noexcept { return config_x_; }
  const HashConfig& config_y() const noexcept { return config_y_; }
  const DependenceGraph& graph() const noexcept { return graph_; }
  const GeneratorFunction& generator() const noexcept { return g_; }

  // Versioned length-checked binary snapshot (see docs/snapshot-format.md).
  // Custom generators are not serializable and are rejected.
  std::vector<std::uint8_t> snapshot() const;
  static StreamState restore(std::span<const std::uint8_t> bytes);

 private:
  void rebuild_from_buffer();
  void incremental_update(const BucketId& i, const BucketId& j);
  void refresh_cores_of_edge(std::size_t edge_index, double sign);

  EpsilonSchedule schedule_;
  GeneratorFunction g_;
  std::uint64_t seed_;
  HashMode mode_;
  int c_h_;

  Eigen::Index d_x_ = 0;
  Eigen::Index d_y_ = 0;
  std::int64_t n_ = 0;
  std::int64_t rebuild_count_ = 0;

  std::vector<double> buffer_x_;  // row-major n x d_x
  std::vector<double> buffer_y_;

  HashConfig config_x_;
  HashConfig config_y_;
  std::vector<PointHasher> hashers_;  // [0] = x side, [1] = y side; empty before first rebuild

  DependenceGraph graph_;
  std::unordered_map<BucketId, std::vector<std::uint32_t>, BucketIdHash> adj_x_;
  std::unordered_map<BucketId, std::vector<std::uint32_t>, BucketIdHash> adj_y_;

  bool fast_path_ = false;
  std::vector<CompensatedSum> cores_;
  std::vector<std::uint32_t> touched_scratch_;
};

}  // namespace edge
