#include "edge/synth.hpp"

#include <cmath>
#include <vector>

#include "edge/parallel.hpp"
#include "edge/rng.hpp"

namespace edge {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2PiE = 2.8378770664093454836;  // ln(2*pi*e)

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

void validate(const GaussNoise& f) {
  if (f.dim < 1) throw ConfigError("gauss-noise: dim must be >= 1");
  if (!(f.noise_scale >= 0.0) || !std::isfinite(f.noise_scale)) {
    throw ConfigError("gauss-noise: noise scale must be finite and >= 0");
  }
}

void validate(const DiscreteGaussMix& f) {
  if (f.atoms < 1) throw ConfigError("discrete-mix: atom count must be >= 1");
  if (f.y_dim < 1) throw ConfigError("discrete-mix: y dim must be >= 1");
}

SampleBatch generate_gauss_noise(const GaussNoise& f, std::int64_t n, std::uint64_t seed) {
  validate(f);
  SampleBatch batch;
  batch.x.resize(n, f.dim);
  batch.y.resize(n, f.dim);
  CounterRng gauss(seed, 1);
  CounterRng noise(seed, 2);
  for (std::int64_t r = 0; r < n; ++r) {
    for (int c = 0; c < f.dim; ++c) {
      const double x = gauss.gaussian();
      batch.x(r, c) = x;
      batch.y(r, c) = x + f.noise_scale * noise.uniform();
    }
  }
  return batch;
}

SampleBatch generate_discrete_mix(const DiscreteGaussMix& f, std::int64_t n,
                                  std::uint64_t seed) {
  validate(f);
  SampleBatch batch;
  batch.x.resize(n, 1);
  batch.y.resize(n, f.y_dim);
  CounterRng atoms(seed, 1);
  CounterRng gauss(seed, 2);
  for (std::int64_t r = 0; r < n; ++r) {
    const int atom = std::min(f.atoms, static_cast<int>(atoms.uniform() * f.atoms) + 1);
    batch.x(r, 0) = static_cast<double>(atom);
    for (int c = 0; c < f.y_dim; ++c) batch.y(r, c) = gauss.gaussian();
    batch.y(r, 0) += 0.5 * atom;
  }
  return batch;
}

// Entropy Monte-Carlo for GaussNoise: Y = X + aU has the exact product
// density f(y) = prod_c (Phi(y_c) - Phi(y_c - a)) / a, so
// h(Y) = -E[ln f(Y)] and I = h(Y) - d ln a. Chunked over fixed counter
// ranges; thread count never changes the result.
OracleValue oracle_gauss_noise(const GaussNoise& f, const OracleOptions& options) {
  validate(f);
  if (f.noise_scale == 0.0) {
    throw NumericError("gauss-noise oracle: a = 0 gives infinite MI");
  }
  const double a = f.noise_scale;
  const std::int64_t m = options.mc_samples;
  const std::int64_t chunk = 1 << 20;
  const std::int64_t n_chunks = (m + chunk - 1) / chunk;
  std::vector<double> sums(static_cast<std::size_t>(n_chunks));
  std::vector<double> sq_sums(static_cast<std::size_t>(n_chunks));
  const CounterRng gauss(options.seed, 11);
  const CounterRng noise(options.seed, 12);

  parallel_for_index(
      n_chunks,
      [&](std::int64_t c) {
        const std::int64_t lo = c * chunk;
        const std::int64_t hi = std::min(m, lo + chunk);
        CompensatedSum s, s2;
        for (std::int64_t i = lo; i < hi; ++i) {
          double log_f = 0.0;
          for (int k = 0; k < f.dim; ++k) {
            const std::uint64_t base = 2 * static_cast<std::uint64_t>(i * f.dim + k);
            const double u1 = gauss.uniform_at(base);
            const double u2 = gauss.uniform_at(base + 1);
            const double x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
            const double y = x + a * noise.uniform_at(static_cast<std::uint64_t>(i * f.dim + k));
            log_f += std::log((normal_cdf(y) - normal_cdf(y - a)) / a);
          }
          s.add(-log_f);
          s2.add(log_f * log_f);
        }
        sums[static_cast<std::size_t>(c)] = s.value();
        sq_sums[static_cast<std::size_t>(c)] = s2.value();
      },
      options.threads);

  CompensatedSum total, total_sq;
  for (std::int64_t c = 0; c < n_chunks; ++c) {
    total.add(sums[static_cast<std::size_t>(c)]);
    total_sq.add(sq_sums[static_cast<std::size_t>(c)]);
  }
  const double mean = total.value() / static_cast<double>(m);
  const double var =
      std::max(0.0, total_sq.value() / static_cast<double>(m) - mean * mean);
  const double se = std::sqrt(var / static_cast<double>(m));
  const double h_y = mean;
  return OracleValue{h_y - f.dim * std::log(a), 3.0 * se};
}

// Adaptive Simpson on [lo, hi].
template <typename F>
double simpson_recurse(const F& fn, double lo, double mid, double hi, double f_lo,
                       double f_mid, double f_hi, double whole, double tol, int depth) {
  const double lm = 0.5 * (lo + mid);
  const double mh = 0.5 * (mid + hi);
  const double f_lm = fn(lm);
  const double f_mh = fn(mh);
  const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
  const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_mh + f_hi);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_recurse(fn, lo, lm, mid, f_lo, f_lm, f_mid, left, tol * 0.5, depth - 1) +
         simpson_recurse(fn, mid, mh, hi, f_mid, f_mh, f_hi, right, tol * 0.5, depth - 1);
}

template <typename F>
double adaptive_simpson(const F& fn, double lo, double hi, double tol) {
  const double mid = 0.5 * (lo + hi);
  const double f_lo = fn(lo);
  const double f_mid = fn(mid);
  const double f_hi = fn(hi);
  const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
  return simpson_recurse(fn, lo, mid, hi, f_lo, f_mid, f_hi, whole, tol, 48);
}

// DiscreteGaussMix: I = h(mixture of N(x/2, 1) on the first Y coordinate)
// - ln(2 pi e)/2; the remaining coordinates are independent standard
// normals on both sides and cancel.
OracleValue oracle_discrete_mix(const DiscreteGaussMix& f) {
  validate(f);
  const int k = f.atoms;
  auto mixture = [k](double y) {
    double m = 0.0;
    for (int x = 1; x <= k; ++x) m += normal_pdf(y - 0.5 * x);
    return m / k;
  };
  auto integrand = [&](double y) {
    const double m = mixture(y);
    return m > 0.0 ? -m * std::log(m) : 0.0;
  };
  const double lo = 0.5 - 12.0;
  const double hi = 0.5 * k + 12.0;
  const double tol = 1e-11;
  const double h_mix = adaptive_simpson(integrand, lo, hi, tol);
  return OracleValue{h_mix - 0.5 * kLn2PiE, 1e-6};
}

}  // namespace

SampleBatch generate(const SyntheticFamily& family, std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw EmptyInputError("generate: n must be >= 1");
  return std::visit(
      [&](const auto& f) -> SampleBatch {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussNoise>) {
          return generate_gauss_noise(f, n, seed);
        } else {
          return generate_discrete_mix(f, n, seed);
        }
      },
      family);
}

OracleValue oracle_mi(const SyntheticFamily& family, const OracleOptions& options) {
  return std::visit(
      [&](const auto& f) -> OracleValue {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, GaussNoise>) {
          return oracle_gauss_noise(f, options);
        } else {
          return oracle_discrete_mix(f);
        }
      },
      family);
}

}  // namespace edge
