#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef EDGE_CLI_PATH
#error "EDGE_CLI_PATH must point at the edge binary"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code;
  std::string output;  // stdout only
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(EDGE_CLI_PATH) + " " + args + " 2>/dev/null";
  std::FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    output.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  return RunResult{WEXITSTATUS(status), output};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "edge_cli_test";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p);
  f << content;
}

// First JSON document after the config echo line.
nlohmann::json report_of(const std::string& output) {
  const auto pos = output.find('\n');
  REQUIRE(pos != std::string::npos);
  return nlohmann::json::parse(output.substr(pos + 1));
}

}  // namespace

TEST_CASE("estimate reproduces the dependent-pairs hand oracle") {
  const fs::path dir = scratch_dir();
  write_file(dir / "x.csv", "0.1\n0.1\n0.9\n0.9\n");
  write_file(dir / "y.csv", "0.1\n0.1\n0.9\n0.9\n");
  const std::string base = "estimate --x " + (dir / "x.csv").string() + " --y " +
                           (dir / "y.csv").string() + " --mode exact";

  SUBCASE("nats") {
    const RunResult r = run_cli(base + " --single-epsilon 0.5 --format json");
    REQUIRE(r.exit_code == 0);
    const auto report = report_of(r.output);
    CHECK(std::abs(report["estimate_nats"].get<double>() - 0.6931471805599453) <= 1e-6);
  }

  SUBCASE("bits conversion") {
    const RunResult r = run_cli(base + " --single-epsilon 0.5 --bits --format json");
    REQUIRE(r.exit_code == 0);
    const auto report = report_of(r.output);
    CHECK(std::abs(report["estimate_bits"].get<double>() - 1.0) <= 1e-6);
  }

  SUBCASE("config echo makes runs self-describing") {
    const RunResult r = run_cli(base + " --single-epsilon 0.5");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.rfind("config ", 0) == 0);
    CHECK(r.output.find("\"command\":\"estimate\"") != std::string::npos);
  }
}

TEST_CASE("estimate input failures exit with the input code") {
  const fs::path dir = scratch_dir();
  write_file(dir / "empty.csv", "");
  write_file(dir / "ok.csv", "1.0\n2.0\n");
  write_file(dir / "short.csv", "1.0\n");

  CHECK(run_cli("estimate --x " + (dir / "empty.csv").string() + " --y " +
                (dir / "ok.csv").string())
            .exit_code == 2);
  CHECK(run_cli("estimate --x " + (dir / "ok.csv").string() + " --y " +
                (dir / "short.csv").string())
            .exit_code == 2);
  CHECK(run_cli("estimate --x " + (dir / "missing.csv").string() + " --y " +
                (dir / "ok.csv").string())
            .exit_code == 2);
}

TEST_CASE("configuration failures exit with the config code") {
  CHECK(run_cli("bench-mse --trials 1 --n-list 100").exit_code == 3);
  CHECK(run_cli("solve-weights --t-values 1,2,3 --degree 5").exit_code == 3);
  CHECK(run_cli("estimate --no-such-flag").exit_code == 3);
  CHECK(run_cli("bench-mse --family no-such-family").exit_code == 3);
}

TEST_CASE("solve-weights emits the hand-oracle weights") {
  const RunResult r = run_cli("solve-weights --t-values 1,2 --degree 1 --format json");
  REQUIRE(r.exit_code == 0);
  const auto report = report_of(r.output);
  const auto w = report["weights"].get<std::vector<double>>();
  REQUIRE(w.size() == 2);
  CHECK(std::abs(w[0] - 2.0) <= 1e-10);
  CHECK(std::abs(w[1] + 1.0) <= 1e-10);
}

TEST_CASE("bench-mse result files are byte-deterministic") {
  const fs::path dir = scratch_dir();
  const std::string args =
      "bench-mse --family gauss-noise --d 1 --a 0.5 --n-list 200,400 --trials 4 "
      "--seed 9 --oracle-samples 200000 --threads 4 --out ";
  REQUIRE(run_cli(args + (dir / "a.csv").string()).exit_code == 0);
  REQUIRE(run_cli(args + (dir / "b.csv").string()).exit_code == 0);
  std::ifstream fa(dir / "a.csv"), fb(dir / "b.csv");
  const std::string a((std::istreambuf_iterator<char>(fa)), {});
  const std::string b((std::istreambuf_iterator<char>(fb)), {});
  CHECK(a == b);
  CHECK(a.rfind("n,variant,mean,mse,var,oracle", 0) == 0);
  CHECK(a.find("200,ensemble,") != std::string::npos);
  CHECK(a.find("400,single,") != std::string::npos);
}

TEST_CASE("stream-demo runs end to end") {
  const RunResult r = run_cli(
      "stream-demo --family gauss-noise --d 1 --a 0.3 --n 300 --every 100 --seed 5");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("n,estimate,epsilon,rebuilds") != std::string::npos);
  CHECK(r.output.find("300,") != std::string::npos);
  CHECK(r.output.find("snapshot_bytes=") != std::string::npos);
}

TEST_CASE("bench-runtime reports per-sample timing") {
  const RunResult r = run_cli(
      "bench-runtime --family gauss-noise --d 1 --a 0.5 --n-list 200,400 --reps 1 --seed 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("n,wall_seconds,per_sample_seconds") != std::string::npos);
}
