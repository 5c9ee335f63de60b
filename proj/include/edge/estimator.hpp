#pragma once

#include <functional>
#include <memory>
#include <string>

#include "edge/graph.hpp"

namespace edge {

inline constexpr double kDefaultClipBound = 1e6;

enum class GeneratorKind { kShannon, kAlpha, kTotalVariation, kChiSquare, kCustom };

// Convex generator g with g(1) = 0 plus the clipping bound U of
// assumption A2; the estimator evaluates the clipped g~(x) = min{g(x), U}.
//
// Presets additionally expose an N-separable decomposition
//   N_i * M_j * g(omega_ij) = sum_k beta_k(N) * c_k(N_i, M_j, N_ij)
// with N-free cores c_k, which the online estimator maintains
// incrementally (total variation has no such form and falls back to
// recomputation).
class GeneratorFunction {
 public:
  static GeneratorFunction shannon(double clip_bound = kDefaultClipBound);
  static GeneratorFunction alpha(double alpha, double clip_bound = kDefaultClipBound);
  static GeneratorFunction total_variation(double clip_bound = kDefaultClipBound);
  static GeneratorFunction chi_square(double clip_bound = kDefaultClipBound);
  static GeneratorFunction custom(std::string name, std::function<double(double)> g,
                                  double clip_bound = kDefaultClipBound);

  double operator()(double x) const;
  double clipped(double x) const;

  const std::string& name() const noexcept { return name_; }
  GeneratorKind kind() const noexcept { return kind_; }
  double alpha_param() const noexcept { return alpha_; }
  double clip_bound() const noexcept { return clip_; }

  // N-separable support for the online fast path.
  int core_count() const noexcept;
  // Appends the cores c_k of one edge (counts as doubles) to `out[0..core_count)`.
  void edge_cores(double ni, double mj, double nij, double* out) const;
  // Scalar coefficients beta_k(N); combined estimate = sum_k beta_k * C_k / N^2.
  void betas(double n, double* out) const;
  // sup of raw g over (0, n]; +inf when unknown (custom). While this stays
  // <= clip_bound() no edge term can clip and the separable path is exact.
  double sup_on_range(double n) const;
  bool has_separable_form() const noexcept { return core_count() > 0; }

 private:
  GeneratorFunction(GeneratorKind kind, std::string name, double alpha, double clip,
                    std::function<double(double)> g);

  GeneratorKind kind_;
  std::string name_;
  double alpha_ = 0.0;
  double clip_ = kDefaultClipBound;
  std::function<double(double)> g_;
};

struct MIEstimate {
  double value = 0.0;
  std::int64_t n_samples = 0;
  double epsilon_used = 0.0;
  std::string g_name;
};

// Base estimator: sum over stored edges of omega_i * omega'_j * g~(omega_ij).
MIEstimate base_estimate(const DependenceGraph& graph, const GeneratorFunction& g);

// End-to-end: build_graph then base_estimate, bit-for-bit.
MIEstimate mi_from_samples(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           double epsilon, const GeneratorFunction& g, std::uint64_t seed,
                           HashMode mode = HashMode::kFloor,
                           int c_h = kDefaultBucketFactor);

}  // namespace edge
