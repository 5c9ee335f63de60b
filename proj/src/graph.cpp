#include "edge/graph.hpp"

#include <algorithm>

namespace edge {

std::int64_t DependenceGraph::x_count(const BucketId& id) const {
  auto it = x_counts_.find(id);
  return it == x_counts_.end() ? 0 : it->second;
}

std::int64_t DependenceGraph::y_count(const BucketId& id) const {
  auto it = y_counts_.find(id);
  return it == y_counts_.end() ? 0 : it->second;
}

std::int64_t DependenceGraph::joint_count(const EdgeKey& key) const {
  auto it = joint_counts_.find(key);
  return it == joint_counts_.end() ? 0 : it->second;
}

EdgeWeight DependenceGraph::weight(const EdgeKey& key) const {
  const double n = static_cast<double>(n_);
  const double ni = static_cast<double>(x_count(key.x));
  const double mj = static_cast<double>(y_count(key.y));
  const double nij = static_cast<double>(joint_count(key));
  return EdgeWeight{ni / n, mj / n, nij * n / (ni * mj)};
}

bool DependenceGraph::insert_pair(const BucketId& i, const BucketId& j) {
  ++n_;
  ++x_counts_[i];
  ++y_counts_[j];
  auto [it, created] = joint_counts_.try_emplace(EdgeKey{i, j}, 0);
  ++it->second;
  if (created) edge_order_.push_back(it->first);
  return created;
}

void DependenceGraph::reserve(std::int64_t n) {
  const auto s = static_cast<std::size_t>(n);
  x_counts_.reserve(s);
  y_counts_.reserve(s);
  joint_counts_.reserve(s);
  edge_order_.reserve(s);
}

DependenceGraph build_graph(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                            const HashConfig& config_x, const HashConfig& config_y) {
  if (x.rows() == 0) throw EmptyInputError("build_graph: empty sample batch");
  if (x.rows() != y.rows()) {
    throw InvalidInputError("build_graph: X and Y row counts differ");
  }
  if (config_x.epsilon != config_y.epsilon) {
    throw ConfigError("build_graph: X and Y configs must share epsilon");
  }
  PointHasher hash_x(config_x, x.cols());
  PointHasher hash_y(config_y, y.cols());

  DependenceGraph g;
  g.set_epsilon(config_x.epsilon);
  g.reserve(x.rows());
  for (Eigen::Index k = 0; k < x.rows(); ++k) {
    g.insert_pair(hash_x(x.row(k).transpose()), hash_y(y.row(k).transpose()));
  }
  return g;
}

EdgeRange edge_iter(const DependenceGraph& graph) { return EdgeRange(graph); }

GraphStats graph_stats(const DependenceGraph& graph) {
  GraphStats s{graph.x_node_count(), graph.y_node_count(), graph.edge_count(), 0, 0};
  for (const auto& [id, c] : graph.x_counts()) s.max_x_count = std::max(s.max_x_count, c);
  for (const auto& [id, c] : graph.y_counts()) s.max_y_count = std::max(s.max_y_count, c);
  return s;
}

}  // namespace edge
