#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edge/estimator.hpp"

namespace edge {

// Minimum-norm solution of the ensemble weight system of "EDGE":
//   sum_t w(t) = 1,   sum_t w(t) t^i = 0  for i = 1..degree,
// i.e. A w = e_1 with A the (degree+1) x T moment matrix. Solved as
// w = A^T (A A^T)^{-1} e_1 via a long-double symmetric solve with
// iterative refinement; requires T > degree and distinct t.
Eigen::VectorXd solve_weights(const Eigen::VectorXd& t_values, int degree);

// Default index grid: T points evenly spaced on [1.5, 9]. Weights depend
// only on the grid's shape (the constraint set is scale invariant), and
// this span keeps their norm small; see README for the calibration.
std::vector<double> default_t_values(int count);

struct EnsembleOptions {
  std::vector<double> t_values;  // empty -> default_t_values(degree + 3)
  // Constraint/bias order; -1 infers d_x + d_y. The degenerate order-0
  // single-member form is allowed (weights reduce to w = [1]).
  int degree = -1;
  GeneratorFunction g = GeneratorFunction::shannon();
  std::uint64_t seed = 0;
  HashMode mode = HashMode::kFloor;
  int c_h = kDefaultBucketFactor;
};

struct EnsembleMember {
  double t;
  double epsilon;
  double weight;
  double estimate;
  std::int64_t x_nodes;
  std::int64_t y_nodes;
  bool degenerate;  // all points in a single bucket on both sides
};

struct EnsembleResult {
  MIEstimate estimate;
  int degree;
  std::int64_t n_samples;
  std::vector<EnsembleMember> members;
  std::vector<double> weights;
  std::vector<std::string> warnings;
};

// Weighted ensemble estimator: I_w = sum_t w(t) * I_{eps(t)} with
// eps(t) = t * N^{-1/(2 degree)} and per-t sub-seeds derived from the
// master seed. Exact affine combination of base estimates.
EnsembleResult edge_estimate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                             const EnsembleOptions& options = {});

}  // namespace edge
