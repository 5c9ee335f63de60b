#include "edge/estimator.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace edge {

namespace {

double shannon_g(double x) { return x * std::log(x); }
double tv_g(double x) { return 0.5 * std::abs(x - 1.0); }
double chi2_g(double x) { return (x - 1.0) * (x - 1.0); }

}  // namespace

GeneratorFunction::GeneratorFunction(GeneratorKind kind, std::string name, double alpha,
                                     double clip, std::function<double(double)> g)
    : kind_(kind), name_(std::move(name)), alpha_(alpha), clip_(clip), g_(std::move(g)) {
  if (!(clip_ > 0.0)) throw ConfigError("generator: clip bound U must be positive");
  const double at_one = g_(1.0);
  if (!(std::abs(at_one) <= 1e-12)) {
    throw ConfigError("generator '" + name_ + "': g(1) must be 0");
  }
}

GeneratorFunction GeneratorFunction::shannon(double clip_bound) {
  return GeneratorFunction(GeneratorKind::kShannon, "shannon", 0.0, clip_bound, shannon_g);
}

GeneratorFunction GeneratorFunction::alpha(double alpha, double clip_bound) {
  if (!(alpha > 0.0) || alpha == 1.0) {
    throw ConfigError("generator: alpha must be positive and != 1");
  }
  auto g = [alpha](double x) { return (std::pow(x, alpha) - 1.0) / (alpha - 1.0); };
  return GeneratorFunction(GeneratorKind::kAlpha, "alpha", alpha, clip_bound, g);
}

GeneratorFunction GeneratorFunction::total_variation(double clip_bound) {
  return GeneratorFunction(GeneratorKind::kTotalVariation, "tv", 0.0, clip_bound, tv_g);
}

GeneratorFunction GeneratorFunction::chi_square(double clip_bound) {
  return GeneratorFunction(GeneratorKind::kChiSquare, "chi2", 0.0, clip_bound, chi2_g);
}

GeneratorFunction GeneratorFunction::custom(std::string name, std::function<double(double)> g,
                                            double clip_bound) {
  return GeneratorFunction(GeneratorKind::kCustom, std::move(name), 0.0, clip_bound,
                           std::move(g));
}

double GeneratorFunction::operator()(double x) const { return g_(x); }

double GeneratorFunction::clipped(double x) const {
  const double v = g_(x);
  return v < clip_ ? v : clip_;
}

int GeneratorFunction::core_count() const noexcept {
  switch (kind_) {
    case GeneratorKind::kShannon:
      return 2;
    case GeneratorKind::kAlpha:
      return 2;
    case GeneratorKind::kChiSquare:
      return 3;
    default:
      return 0;
  }
}

void GeneratorFunction::edge_cores(double ni, double mj, double nij, double* out) const {
  switch (kind_) {
    case GeneratorKind::kShannon:
      // N_i M_j * (N rho) ln(N rho) = (N ln N) N_ij + N * [N_ij ln(N_ij/(N_i M_j))]
      out[0] = nij;
      out[1] = nij * std::log(nij / (ni * mj));
      return;
    case GeneratorKind::kAlpha:
      out[0] = std::pow(nij, alpha_) * std::pow(ni * mj, 1.0 - alpha_);
      out[1] = ni * mj;
      return;
    case GeneratorKind::kChiSquare:
      out[0] = nij * nij / (ni * mj);
      out[1] = nij;
      out[2] = ni * mj;
      return;
    default:
      return;
  }
}

void GeneratorFunction::betas(double n, double* out) const {
  switch (kind_) {
    case GeneratorKind::kShannon:
      out[0] = n * std::log(n);
      out[1] = n;
      return;
    case GeneratorKind::kAlpha:
      out[0] = std::pow(n, alpha_) / (alpha_ - 1.0);
      out[1] = -1.0 / (alpha_ - 1.0);
      return;
    case GeneratorKind::kChiSquare:
      out[0] = n * n;
      out[1] = -2.0 * n;
      out[2] = 1.0;
      return;
    default:
      return;
  }
}

double GeneratorFunction::sup_on_range(double n) const {
  switch (kind_) {
    case GeneratorKind::kShannon:
      // g <= 0 on (0,1]; increasing beyond, so sup = max(0, n ln n).
      return n >= 1.0 ? n * std::log(n) : 0.0;
    case GeneratorKind::kAlpha:
      if (alpha_ > 1.0) return (std::pow(n, alpha_) - 1.0) / (alpha_ - 1.0);
      return 1.0 / (1.0 - alpha_);  // attained as x -> 0+
    case GeneratorKind::kChiSquare:
      return std::max((n - 1.0) * (n - 1.0), 1.0);
    case GeneratorKind::kTotalVariation:
      return std::max(std::abs(n - 1.0), 1.0) * 0.5;
    default:
      return std::numeric_limits<double>::infinity();
  }
}

MIEstimate base_estimate(const DependenceGraph& graph, const GeneratorFunction& g) {
  if (graph.n_samples() < 1) throw EmptyInputError("base_estimate: empty graph");
  CompensatedSum sum;
  for (const EdgeKey& key : graph.edge_order()) {
    const EdgeWeight w = graph.weight(key);
    const double term = g.clipped(w.omega_ij);
    if (!std::isfinite(term)) {
      std::ostringstream msg;
      msg << "base_estimate: non-finite g(" << w.omega_ij << ")";
      throw NumericError(msg.str());
    }
    sum.add(w.omega_i * w.omega_j_prime * term);
  }
  return MIEstimate{sum.value(), graph.n_samples(), graph.epsilon(), g.name()};
}

MIEstimate mi_from_samples(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double epsilon,
                           const GeneratorFunction& g, std::uint64_t seed, HashMode mode,
                           int c_h) {
  if (x.rows() == 0) throw EmptyInputError("mi_from_samples: empty sample batch");
  auto [cx, cy] = make_xy_configs(epsilon, x.rows(), seed, mode, c_h);
  return base_estimate(build_graph(x, y, cx, cy), g);
}

}  // namespace edge
