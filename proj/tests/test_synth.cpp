#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "edge/csv.hpp"
#include "edge/synth.hpp"

using namespace edge;

TEST_CASE("gauss-noise generation") {
  SUBCASE("zero noise copies X") {
    const auto batch = generate(GaussNoise{2, 0.0}, 200, 7);
    CHECK(batch.x == batch.y);
  }

  SUBCASE("reproducible given the seed") {
    const auto a = generate(GaussNoise{3, 0.5}, 100, 42);
    const auto b = generate(GaussNoise{3, 0.5}, 100, 42);
    const auto c = generate(GaussNoise{3, 0.5}, 100, 43);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.x != c.x);
  }

  SUBCASE("noise mean matches a/2 within Monte-Carlo bands") {
    const std::int64_t n = 20'000;
    const double a = 0.2;
    const auto batch = generate(GaussNoise{2, a}, n, 3);
    const Eigen::VectorXd mean_diff = (batch.y - batch.x).colwise().mean();
    const double band = 3.0 * (a / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean_diff[0] - a / 2.0) <= band);
    CHECK(std::abs(mean_diff[1] - a / 2.0) <= band);
  }
}

TEST_CASE("discrete-mix generation") {
  const auto batch = generate(DiscreteGaussMix{4, 4}, 5000, 19);
  CHECK(batch.x.cols() == 1);
  CHECK(batch.y.cols() == 4);
  for (Eigen::Index i = 0; i < batch.x.rows(); ++i) {
    const double v = batch.x(i, 0);
    CHECK(v == std::floor(v));
    CHECK(v >= 1.0);
    CHECK(v <= 4.0);
  }
  SUBCASE("k=1 makes X constant") {
    const auto b1 = generate(DiscreteGaussMix{1, 2}, 50, 1);
    CHECK((b1.x.array() == 1.0).all());
  }
}

TEST_CASE("discrete-mix oracle against quadrature pins") {
  CHECK(std::abs(oracle_mi(DiscreteGaussMix{1, 3}).value) <= 1e-9);
  // pinned from an independent scipy quadrature of the same integrals
  CHECK(std::abs(oracle_mi(DiscreteGaussMix{2, 1}).value - 0.030311301) <= 1e-6);
  CHECK(std::abs(oracle_mi(DiscreteGaussMix{4, 4}).value - 0.135829143) <= 1e-6);
  CHECK(std::abs(oracle_mi(DiscreteGaussMix{3, 2}).value - 0.077054880) <= 1e-6);
}

TEST_CASE("gauss-noise oracle" * doctest::timeout(300)) {
  OracleOptions opts;
  opts.mc_samples = 6'000'000;

  SUBCASE("matches the scipy quadrature pin at d=2, a=1") {
    const OracleValue v = oracle_mi(GaussNoise{2, 1.0}, opts);
    CHECK(std::abs(v.value - 2.917917648) <= v.error_bound + 1e-3);
    CHECK(v.error_bound <= 2e-3);
  }

  SUBCASE("strictly decreasing in the noise scale") {
    double prev = std::numeric_limits<double>::infinity();
    for (double a : {0.1, 0.2, 0.5, 1.0}) {
      const double v = oracle_mi(GaussNoise{2, a}, opts).value;
      CHECK(v < prev);
      prev = v;
    }
  }

  SUBCASE("large noise drives MI toward zero") {
    // true value 0.01806 (the MI decays like ~1.8/a, not below 0.01 yet)
    const OracleValue v = oracle_mi(GaussNoise{1, 100.0}, opts);
    CHECK(v.value <= 0.02);
    CHECK(v.value >= 0.0);
  }

  SUBCASE("self-consistency when doubling the sample count") {
    OracleOptions small;
    small.mc_samples = 1'000'000;
    OracleOptions big;
    big.mc_samples = 2'000'000;
    const OracleValue v1 = oracle_mi(GaussNoise{2, 0.5}, small);
    const OracleValue v2 = oracle_mi(GaussNoise{2, 0.5}, big);
    CHECK(std::abs(v1.value - v2.value) <= v1.error_bound);
  }

  SUBCASE("a=0 is an infinite-MI error") {
    CHECK_THROWS_AS(oracle_mi(GaussNoise{2, 0.0}, opts), NumericError);
  }
}

TEST_CASE("csv round trip and validation") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "edge_csv_test";
  fs::create_directories(dir);

  SUBCASE("round trip preserves values") {
    const auto batch = generate(GaussNoise{3, 0.7}, 64, 23);
    const std::string path = (dir / "batch.csv").string();
    write_matrix_csv(path, batch.x);
    const Eigen::MatrixXd back = read_matrix_csv(path);
    REQUIRE(back.rows() == batch.x.rows());
    REQUIRE(back.cols() == batch.x.cols());
    CHECK((back - batch.x).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("ragged and non-finite inputs are rejected with positions") {
    const std::string ragged = (dir / "ragged.csv").string();
    {
      std::FILE* f = std::fopen(ragged.c_str(), "w");
      std::fputs("1.0,2.0\n3.0\n", f);
      std::fclose(f);
    }
    CHECK_THROWS_WITH_AS(read_matrix_csv(ragged), doctest::Contains(":2"),
                         InvalidInputError);

    const std::string nan_file = (dir / "nan.csv").string();
    {
      std::FILE* f = std::fopen(nan_file.c_str(), "w");
      std::fputs("1.0,nan\n", f);
      std::fclose(f);
    }
    CHECK_THROWS_AS(read_matrix_csv(nan_file), InvalidInputError);

    const std::string empty = (dir / "empty.csv").string();
    {
      std::FILE* f = std::fopen(empty.c_str(), "w");
      std::fclose(f);
    }
    CHECK_THROWS_AS(read_matrix_csv(empty), EmptyInputError);
  }
}
