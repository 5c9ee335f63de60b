#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "edge/hashing.hpp"

namespace edge {

struct EdgeKey {
  BucketId x;
  BucketId y;

  friend bool operator==(const EdgeKey& a, const EdgeKey& b) noexcept {
    return a.x == b.x && a.y == b.y;
  }
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& k) const noexcept {
    return static_cast<std::size_t>(mix64(k.x.hash() ^ mix64(k.y.hash())));
  }
};

// omega_i = N_i/N, omega'_j = M_j/N, omega_ij = N_ij*N/(N_i*M_j).
struct EdgeWeight {
  double omega_i;
  double omega_j_prime;
  double omega_ij;
};

struct GraphStats {
  std::int64_t x_nodes;
  std::int64_t y_nodes;
  std::int64_t edges;
  std::int64_t max_x_count;
  std::int64_t max_y_count;
};

// Bipartite dependence graph over hash buckets: sparse collision counts
// N_i (X side), M_j (Y side) and joint counts N_ij. Zero-count keys are
// never stored. Edge iteration follows insertion order, so sums are
// deterministic regardless of map internals.
class DependenceGraph {
 public:
  std::int64_t n_samples() const noexcept { return n_; }
  double epsilon() const noexcept { return epsilon_; }

  std::int64_t x_count(const BucketId& id) const;
  std::int64_t y_count(const BucketId& id) const;
  std::int64_t joint_count(const EdgeKey& key) const;

  std::int64_t x_node_count() const noexcept { return static_cast<std::int64_t>(x_counts_.size()); }
  std::int64_t y_node_count() const noexcept { return static_cast<std::int64_t>(y_counts_.size()); }
  std::int64_t edge_count() const noexcept { return static_cast<std::int64_t>(edge_order_.size()); }

  const std::vector<EdgeKey>& edge_order() const noexcept { return edge_order_; }

  EdgeWeight weight(const EdgeKey& key) const;

  const std::unordered_map<BucketId, std::int64_t, BucketIdHash>& x_counts() const noexcept {
    return x_counts_;
  }
  const std::unordered_map<BucketId, std::int64_t, BucketIdHash>& y_counts() const noexcept {
    return y_counts_;
  }

  // Builder/online primitive: records one sample pair. Returns true when
  // the edge was newly created.
  bool insert_pair(const BucketId& i, const BucketId& j);

  void set_epsilon(double eps) noexcept { epsilon_ = eps; }
  void reserve(std::int64_t n);

 private:
  std::int64_t n_ = 0;
  double epsilon_ = 0.0;
  std::unordered_map<BucketId, std::int64_t, BucketIdHash> x_counts_;
  std::unordered_map<BucketId, std::int64_t, BucketIdHash> y_counts_;
  std::unordered_map<EdgeKey, std::int64_t, EdgeKeyHash> joint_counts_;
  std::vector<EdgeKey> edge_order_;
};

// Single pass over the sample batch per Algorithm "MI Dependence Graph
// Estimator": hash each pair, bump N_i, M_j, N_ij. O(N*d).
DependenceGraph build_graph(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                            const HashConfig& config_x, const HashConfig& config_y);

// Streaming view over stored edges with weights; insertion order.
class EdgeRange {
 public:
  struct Entry {
    const EdgeKey& key;
    std::int64_t n_ij;
    EdgeWeight weight;
  };

  class Iterator {
   public:
    Iterator(const DependenceGraph* g, std::size_t pos) : g_(g), pos_(pos) {}
    Entry operator*() const {
      const EdgeKey& k = g_->edge_order()[pos_];
      return Entry{k, g_->joint_count(k), g_->weight(k)};
    }
    Iterator& operator++() {
      ++pos_;
      return *this;
    }
    friend bool operator!=(const Iterator& a, const Iterator& b) { return a.pos_ != b.pos_; }

   private:
    const DependenceGraph* g_;
    std::size_t pos_;
  };

  explicit EdgeRange(const DependenceGraph& g) : g_(&g) {}
  Iterator begin() const { return Iterator(g_, 0); }
  Iterator end() const { return Iterator(g_, g_->edge_order().size()); }

 private:
  const DependenceGraph* g_;
};

EdgeRange edge_iter(const DependenceGraph& graph);

GraphStats graph_stats(const DependenceGraph& graph);

}  // namespace edge
