#include "edge/ensemble.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace edge {

namespace {

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

constexpr double kResidualTolerance = 1e-10;

LongMatrix moment_matrix(const Eigen::VectorXd& t, int degree) {
  const Eigen::Index n = t.size();
  LongMatrix a(degree + 1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    long double p = 1.0L;
    a(0, j) = 1.0L;
    for (int i = 1; i <= degree; ++i) {
      p *= static_cast<long double>(t[j]);
      a(i, j) = p;
    }
  }
  return a;
}

}  // namespace

Eigen::VectorXd solve_weights(const Eigen::VectorXd& t_values, int degree) {
  const Eigen::Index t_count = t_values.size();
  if (degree < 0) throw InfeasibleConfigError("solve_weights: degree must be >= 0");
  if (t_count <= degree) {
    std::ostringstream msg;
    msg << "solve_weights: need T > degree, got T = " << t_count << ", degree = " << degree;
    throw InfeasibleConfigError(msg.str());
  }
  std::set<double> distinct(t_values.data(), t_values.data() + t_count);
  if (static_cast<Eigen::Index>(distinct.size()) != t_count) {
    throw ConditioningError("solve_weights: t values must be distinct");
  }
  for (Eigen::Index i = 0; i < t_count; ++i) {
    if (!(t_values[i] > 0.0) || !std::isfinite(t_values[i])) {
      throw InvalidInputError("solve_weights: t values must be positive and finite");
    }
  }

  const LongMatrix a = moment_matrix(t_values, degree);
  const LongMatrix gram = a * a.transpose();
  LongVector rhs = LongVector::Zero(degree + 1);
  rhs[0] = 1.0L;

  Eigen::LDLT<LongMatrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) {
    throw ConditioningError("solve_weights: A*A^T is not positive definite");
  }
  LongVector y = ldlt.solve(rhs);
  // Two refinement sweeps push the constraint residual to rounding level.
  for (int sweep = 0; sweep < 2; ++sweep) {
    LongVector r = rhs - gram * y;
    y += ldlt.solve(r);
  }
  const LongVector w_long = a.transpose() * y;
  const LongVector residual = a * w_long - rhs;
  const double residual_inf = static_cast<double>(residual.cwiseAbs().maxCoeff());
  if (!(residual_inf <= kResidualTolerance)) {
    const long double diag_max = gram.diagonal().maxCoeff();
    const long double diag_min = gram.diagonal().minCoeff();
    std::ostringstream msg;
    msg << "solve_weights: constraint residual " << residual_inf
        << " exceeds " << kResidualTolerance
        << " (Gram diagonal spread ~" << static_cast<double>(diag_max / diag_min)
        << "); t grid too close to singular";
    throw ConditioningError(msg.str());
  }
  return w_long.cast<double>();
}

std::vector<double> default_t_values(int count) {
  if (count < 1) throw InfeasibleConfigError("default_t_values: count must be >= 1");
  std::vector<double> t(static_cast<std::size_t>(count));
  if (count == 1) {
    t[0] = 1.5;
    return t;
  }
  const double lo = 1.5, hi = 9.0;
  for (int i = 0; i < count; ++i) {
    t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  }
  return t;
}

EnsembleResult edge_estimate(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                             const EnsembleOptions& options) {
  if (x.rows() == 0) throw EmptyInputError("edge_estimate: empty sample batch");
  if (x.rows() != y.rows()) throw InvalidInputError("edge_estimate: row counts differ");

  const std::int64_t n = x.rows();
  const int degree =
      options.degree >= 0 ? options.degree : static_cast<int>(x.cols() + y.cols());
  std::vector<double> t_values =
      options.t_values.empty() ? default_t_values(degree + 3) : options.t_values;
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(
      t_values.data(), static_cast<Eigen::Index>(t_values.size()));

  const Eigen::VectorXd w = solve_weights(t, degree);

  // eps(t) = t * N^{-1/(2 degree)}; the degenerate degree-0 ensemble keeps
  // eps(t) = t.
  const double exponent = degree > 0 ? -1.0 / (2.0 * degree) : 0.0;
  const double n_scale = std::pow(static_cast<double>(n), exponent);

  EnsembleResult result;
  result.degree = degree;
  result.n_samples = n;
  result.weights.assign(w.data(), w.data() + w.size());

  CompensatedSum combined;
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    const double eps = t[k] * n_scale;
    auto [cx, cy] = make_xy_configs(eps, n, sub_seed(options.seed, static_cast<std::uint64_t>(k)),
                                    options.mode, options.c_h);
    const DependenceGraph graph = build_graph(x, y, cx, cy);
    const MIEstimate member = base_estimate(graph, options.g);
    const bool degenerate = graph.x_node_count() == 1 && graph.y_node_count() == 1;
    if (degenerate) {
      std::ostringstream msg;
      msg << "member t=" << t[k] << " (epsilon=" << eps
          << ") exceeds the data range: all points share one bucket";
      result.warnings.push_back(msg.str());
    }
    result.members.push_back(EnsembleMember{t[k], eps, w[k], member.value,
                                            graph.x_node_count(), graph.y_node_count(),
                                            degenerate});
    combined.add(w[k] * member.value);
  }

  result.estimate =
      MIEstimate{combined.value(), n, result.members.front().epsilon, options.g.name()};
  return result;
}

}  // namespace edge
