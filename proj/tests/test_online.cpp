#include <doctest.h>

#include <chrono>
#include <cmath>
#include <vector>

#include "edge/online.hpp"
#include "edge/synth.hpp"

using namespace edge;

namespace {

double batch_on_prefix(const StreamState& state, const SampleBatch& batch, std::int64_t n) {
  const Eigen::MatrixXd x = batch.x.topRows(n);
  const Eigen::MatrixXd y = batch.y.topRows(n);
  return base_estimate(build_graph(x, y, state.config_x(), state.config_y()),
                       state.generator())
      .value;
}

}  // namespace

TEST_CASE("stream initialization") {
  StreamState s(EpsilonSchedule::constant(0.5), GeneratorFunction::shannon(), 1);
  CHECK_THROWS_AS(s.estimate(), EmptyInputError);
  CHECK(s.next_rebuild_at() == 1);  // 1 = 2^0
  CHECK(s.size() == 0);

  Eigen::VectorXd x(1), y(1);
  x << 0.3;
  y << 0.7;
  CHECK(s.push(x, y) == 0.0);  // single pair, Shannon
  CHECK(s.size() == 1);
  CHECK(s.rebuild_count() == 1);
  CHECK(s.next_rebuild_at() == 2);

  Eigen::VectorXd bad(2);
  bad << 1.0, 2.0;
  CHECK_THROWS_AS(s.push(bad, y), InvalidInputError);
}

TEST_CASE("four dependent pairs reach ln 2") {
  StreamState s(EpsilonSchedule::constant(0.5), GeneratorFunction::shannon(), 3,
                HashMode::kExactBucket);
  Eigen::VectorXd v(1);
  double last = 0.0;
  for (double val : {0.1, 0.1, 0.9, 0.9}) {
    v << val;
    last = s.push(v, v);
  }
  CHECK(last == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("identical pairs stay at zero") {
  StreamState s(EpsilonSchedule::constant(1.0), GeneratorFunction::shannon(), 4);
  Eigen::VectorXd v(2);
  v << 0.25, 0.25;
  CHECK(s.push(v, v) == 0.0);
  CHECK(s.push(v, v) == 0.0);
  CHECK(s.graph().x_node_count() == 1);
  CHECK(s.graph().y_node_count() == 1);
}

TEST_CASE("online equals batch on every checked prefix") {
  const auto batch = generate(GaussNoise{2, 0.2}, 1000, 77);
  const int d_total = 4;

  SUBCASE("shannon via the separable fast path") {
    StreamState s(EpsilonSchedule::bias_optimal(d_total), GeneratorFunction::shannon(), 5);
    for (std::int64_t i = 0; i < 1000; ++i) {
      const double est = s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
      if ((i + 1) % 100 == 0) {
        const double ref = batch_on_prefix(s, batch, i + 1);
        CAPTURE(i + 1);
        CHECK(std::abs(est - ref) <= 1e-9);
      }
    }
  }

  SUBCASE("chi-square fast path") {
    StreamState s(EpsilonSchedule::bias_optimal(d_total), GeneratorFunction::chi_square(), 5);
    for (std::int64_t i = 0; i < 400; ++i) {
      const double est = s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
      if ((i + 1) % 80 == 0) {
        CHECK(std::abs(est - batch_on_prefix(s, batch, i + 1)) <= 1e-9);
      }
    }
  }

  SUBCASE("alpha=2 fast path") {
    StreamState s(EpsilonSchedule::bias_optimal(d_total), GeneratorFunction::alpha(2.0), 5);
    for (std::int64_t i = 0; i < 300; ++i) {
      const double est = s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
      if ((i + 1) % 60 == 0) {
        CHECK(std::abs(est - batch_on_prefix(s, batch, i + 1)) <= 1e-9);
      }
    }
  }

  SUBCASE("total variation falls back to recomputation") {
    StreamState s(EpsilonSchedule::bias_optimal(d_total),
                  GeneratorFunction::total_variation(), 5);
    for (std::int64_t i = 0; i < 300; ++i) {
      const double est = s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
      if ((i + 1) % 60 == 0) {
        CHECK(std::abs(est - batch_on_prefix(s, batch, i + 1)) <= 1e-9);
      }
    }
  }

  SUBCASE("tight clip bound still equals batch") {
    // U = 2 binds on many edges; the certificate rejects the fast path.
    StreamState s(EpsilonSchedule::bias_optimal(d_total), GeneratorFunction::shannon(2.0), 5);
    for (std::int64_t i = 0; i < 300; ++i) {
      const double est = s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
      if ((i + 1) % 60 == 0) {
        CHECK(std::abs(est - batch_on_prefix(s, batch, i + 1)) <= 1e-9);
      }
    }
  }
}

TEST_CASE("rebuild schedule") {
  StreamState s(EpsilonSchedule::power_law(1.0, -0.2), GeneratorFunction::shannon(), 6);
  const auto batch = generate(GaussNoise{1, 0.3}, 1000, 8);
  for (std::int64_t i = 0; i < 1000; ++i) {
    s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
  }
  // rebuilds at 1, 2, 4, ..., 512: floor(log2(1000)) + 1 = 10
  CHECK(s.rebuild_count() == 10);
  CHECK(s.current_epsilon() == doctest::Approx(std::pow(512.0, -0.2)).epsilon(1e-14));
}

TEST_CASE("snapshot round trip") {
  const auto batch = generate(GaussNoise{2, 0.2}, 2000, 13);
  StreamState s(EpsilonSchedule::bias_optimal(4), GeneratorFunction::shannon(), 21);
  for (std::int64_t i = 0; i < 1000; ++i) {
    s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
  }
  const double before = s.estimate();
  const std::vector<std::uint8_t> bytes = s.snapshot();

  SUBCASE("estimate restores bit-exactly") {
    StreamState r = StreamState::restore(bytes);
    CHECK(r.estimate() == before);
    CHECK(r.size() == 1000);
    CHECK(r.rebuild_count() == s.rebuild_count());
    CHECK(r.current_epsilon() == s.current_epsilon());
  }

  SUBCASE("restored stream continues like the uninterrupted one") {
    StreamState r = StreamState::restore(bytes);
    for (std::int64_t i = 1000; i < 2000; ++i) {
      const double live = s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
      const double restored = r.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
      CHECK(std::abs(live - restored) <= 1e-12);
    }
    CHECK(std::abs(s.estimate() - r.estimate()) <= 1e-12);
  }

  SUBCASE("truncated bytes are rejected") {
    for (std::size_t cut : {std::size_t{0}, std::size_t{4}, bytes.size() / 2,
                            bytes.size() - 3}) {
      const std::span<const std::uint8_t> sliced(bytes.data(), cut);
      CHECK_THROWS_AS(StreamState::restore(sliced), DecodeError);
    }
  }

  SUBCASE("corruption fails the checksum") {
    std::vector<std::uint8_t> mangled = bytes;
    mangled[mangled.size() / 2] ^= 0x40;
    CHECK_THROWS_AS(StreamState::restore(mangled), DecodeError);
  }

  SUBCASE("custom generators cannot snapshot") {
    StreamState c(EpsilonSchedule::constant(0.5),
                  GeneratorFunction::custom("c", [](double v) { return v - 1.0; }), 1);
    Eigen::VectorXd v(1);
    v << 1.0;
    c.push(v, v);
    CHECK_THROWS_AS(c.snapshot(), ConfigError);
  }
}

TEST_CASE("amortized per-push cost stays flat" * doctest::timeout(120)) {
  const auto batch = generate(GaussNoise{2, 0.2}, 16'000, 31);
  auto mean_push_time = [&](std::int64_t n) {
    StreamState s(EpsilonSchedule::bias_optimal(4), GeneratorFunction::shannon(), 17);
    const auto start = std::chrono::steady_clock::now();
    for (std::int64_t i = 0; i < n; ++i) {
      s.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
    }
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count() / static_cast<double>(n);
  };
  mean_push_time(2000);  // warmup
  const double small = mean_push_time(2000);
  const double large = mean_push_time(16'000);
  CAPTURE(small);
  CAPTURE(large);
  CHECK(large <= 2.0 * small);
}
