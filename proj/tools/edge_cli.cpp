#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "edge/csv.hpp"
#include "edge/ensemble.hpp"
#include "edge/online.hpp"
#include "edge/parallel.hpp"
#include "edge/report_json.hpp"
#include "edge/synth.hpp"

namespace {

using nlohmann::json;

constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNumeric = 4;

struct EstimatorOpts {
  std::string g_name = "shannon";
  double alpha = 2.0;
  double u_bound = edge::kDefaultClipBound;
  std::string mode = "floor";
  std::uint64_t seed = 1;
  int c_h = edge::kDefaultBucketFactor;
  std::vector<double> t_values;
  int degree = -1;
  bool bits = false;
};

struct FamilyOpts {
  std::string family = "gauss-noise";
  int dim = 2;
  double a = 0.2;
  int k = 4;
  int dy = 4;
};

struct OutputOpts {
  std::string out;  // empty -> stdout only
  std::string format = "plain";
};

void add_estimator_options(CLI::App* cmd, EstimatorOpts& o) {
  cmd->add_option("--g", o.g_name, "Generator function")
      ->check(CLI::IsMember({"shannon", "alpha", "tv", "chi2"}))
      ->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Alpha divergence order (with --g alpha)")
      ->capture_default_str();
  cmd->add_option("--u-bound", o.u_bound, "Clipping bound U of the generator")
      ->capture_default_str();
  cmd->add_option("--mode", o.mode, "Hashing mode")
      ->check(CLI::IsMember({"floor", "pstable", "exact"}))
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed (falls back to env EDGE_SEED)")
      ->capture_default_str();
  cmd->add_option("--c-h", o.c_h, "Bucket factor c_H, F = c_H * N")->capture_default_str();
  cmd->add_option("--t-values", o.t_values,
                  "Ensemble index grid (default: T=d+3 points on [1.5,9])")
      ->delimiter(',');
  cmd->add_option("--degree", o.degree,
                  "Ensemble constraint order (default: d_x + d_y)")
      ->capture_default_str();
  cmd->add_flag("--bits", o.bits, "Also report the estimate in bits");
}

void add_family_options(CLI::App* cmd, FamilyOpts& o) {
  cmd->add_option("--family", o.family, "Synthetic family")
      ->check(CLI::IsMember({"gauss-noise", "discrete-mix"}))
      ->capture_default_str();
  cmd->add_option("--d", o.dim, "gauss-noise dimension")->capture_default_str();
  cmd->add_option("--a", o.a, "gauss-noise noise scale")->capture_default_str();
  cmd->add_option("--k", o.k, "discrete-mix atom count")->capture_default_str();
  cmd->add_option("--dy", o.dy, "discrete-mix Y dimension")->capture_default_str();
}

edge::GeneratorFunction make_generator(const EstimatorOpts& o) {
  if (o.g_name == "shannon") return edge::GeneratorFunction::shannon(o.u_bound);
  if (o.g_name == "alpha") return edge::GeneratorFunction::alpha(o.alpha, o.u_bound);
  if (o.g_name == "tv") return edge::GeneratorFunction::total_variation(o.u_bound);
  if (o.g_name == "chi2") return edge::GeneratorFunction::chi_square(o.u_bound);
  throw edge::ConfigError("unknown generator '" + o.g_name + "'");
}

edge::HashMode make_mode(const EstimatorOpts& o) {
  if (o.mode == "floor") return edge::HashMode::kFloor;
  if (o.mode == "pstable") return edge::HashMode::kPStable;
  if (o.mode == "exact") return edge::HashMode::kExactBucket;
  throw edge::ConfigError("unknown mode '" + o.mode + "'");
}

edge::SyntheticFamily make_family(const FamilyOpts& o) {
  if (o.family == "gauss-noise") return edge::GaussNoise{o.dim, o.a};
  if (o.family == "discrete-mix") return edge::DiscreteGaussMix{o.k, o.dy};
  throw edge::ConfigError("unknown family '" + o.family + "'");
}

json estimator_config_json(const EstimatorOpts& o) {
  return json{{"g", o.g_name},      {"alpha", o.alpha}, {"u_bound", o.u_bound},
              {"mode", o.mode},     {"seed", o.seed},   {"c_h", o.c_h},
              {"t_values", o.t_values}, {"degree", o.degree}, {"bits", o.bits}};
}

json family_config_json(const FamilyOpts& o) {
  return json{{"family", o.family}, {"d", o.dim}, {"a", o.a}, {"k", o.k}, {"dy", o.dy}};
}

void echo_config(const std::string& command, const json& cfg) {
  json echo{{"command", command}, {"config", cfg}};
  std::cout << "config " << echo.dump() << "\n";
}

void write_text(const OutputOpts& out, const std::string& text) {
  if (out.out.empty() || out.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out.out);
  if (!f) throw edge::InvalidInputError("cannot write output file '" + out.out + "'");
  f << text;
}

std::uint64_t env_seed_default() {
  if (const char* env = std::getenv("EDGE_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 1;
}

// ---------------------------------------------------------------- estimate

int cmd_estimate(const std::string& x_path, const std::string& y_path,
                 const EstimatorOpts& est, double single_epsilon, const OutputOpts& out) {
  const Eigen::MatrixXd x = edge::read_matrix_csv(x_path);
  const Eigen::MatrixXd y = edge::read_matrix_csv(y_path);
  if (x.rows() != y.rows()) {
    throw edge::InvalidInputError("estimate: X and Y row counts differ");
  }

  json cfg = estimator_config_json(est);
  cfg["x"] = x_path;
  cfg["y"] = y_path;
  cfg["single_epsilon"] = single_epsilon;
  echo_config("estimate", cfg);

  const auto start = std::chrono::steady_clock::now();
  json report;
  double value = 0.0;
  if (single_epsilon > 0.0) {
    const edge::MIEstimate e = edge::mi_from_samples(x, y, single_epsilon, make_generator(est),
                                                     est.seed, make_mode(est), est.c_h);
    value = e.value;
    report = json{{"schema_version", edge::kReportSchemaVersion},
                  {"estimate_nats", e.value},
                  {"g", e.g_name},
                  {"n_samples", e.n_samples},
                  {"epsilon", e.epsilon_used}};
  } else {
    edge::EnsembleOptions opts;
    opts.t_values = est.t_values;
    opts.degree = est.degree;
    opts.g = make_generator(est);
    opts.seed = est.seed;
    opts.mode = make_mode(est);
    opts.c_h = est.c_h;
    const edge::EnsembleResult r = edge::edge_estimate(x, y, opts);
    value = r.estimate.value;
    report = edge::ensemble_report_json(r);
  }
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  report["timing_seconds"] = seconds;
  report["config"] = cfg;
  if (est.bits) report["estimate_bits"] = value / std::log(2.0);

  if (out.format == "json") {
    write_text(out, report.dump(2) + "\n");
  } else {
    std::ostringstream text;
    text.precision(12);
    text << "estimate_nats " << value << "\n";
    if (est.bits) text << "estimate_bits " << value / std::log(2.0) << "\n";
    if (report.contains("members")) {
      for (const auto& m : report["members"]) {
        text << "member t=" << m["t"].get<double>() << " epsilon=" << m["epsilon"].get<double>()
             << " weight=" << m["weight"].get<double>()
             << " estimate=" << m["estimate"].get<double>() << "\n";
      }
      for (const auto& w : report["warnings"]) {
        text << "warning " << w.get<std::string>() << "\n";
      }
    }
    text << "timing_seconds " << seconds << "\n";
    write_text(out, text.str());
  }
  return 0;
}

// ---------------------------------------------------------------- bench-mse

struct Variant {
  std::string name;
  bool ensemble;
  double multiplier;  // single-eps schedule multiplier
};

Variant parse_variant(const std::string& token) {
  if (token == "ensemble") return Variant{token, true, 0.0};
  if (token == "single") return Variant{token, false, 1.0};
  if (token.rfind("single:", 0) == 0) {
    const double m = std::stod(token.substr(7));
    if (!(m > 0.0)) throw edge::ConfigError("variant multiplier must be positive");
    return Variant{token, false, m};
  }
  throw edge::ConfigError("unknown variant '" + token + "' (ensemble|single|single:<mult>)");
}

int cmd_bench_mse(const FamilyOpts& fam, const EstimatorOpts& est,
                  const std::vector<std::int64_t>& n_list, int trials,
                  const std::vector<std::string>& variant_names, unsigned threads,
                  std::int64_t oracle_samples, const OutputOpts& out) {
  if (trials < 2) throw edge::ConfigError("bench-mse: trials must be >= 2");
  if (n_list.empty()) throw edge::ConfigError("bench-mse: empty n list");
  std::vector<Variant> variants;
  for (const auto& v : variant_names) variants.push_back(parse_variant(v));

  json cfg = estimator_config_json(est);
  cfg["bench"] = family_config_json(fam);
  cfg["n_list"] = n_list;
  cfg["trials"] = trials;
  cfg["variants"] = variant_names;
  echo_config("bench-mse", cfg);

  const edge::SyntheticFamily family = make_family(fam);
  edge::OracleOptions oracle_opts;
  oracle_opts.mc_samples = oracle_samples;
  oracle_opts.threads = threads;
  const edge::OracleValue oracle = edge::oracle_mi(family, oracle_opts);

  const edge::GeneratorFunction g = make_generator(est);
  const edge::HashMode mode = make_mode(est);
  const int d_total = std::holds_alternative<edge::GaussNoise>(family)
                          ? 2 * std::get<edge::GaussNoise>(family).dim
                          : 1 + std::get<edge::DiscreteGaussMix>(family).y_dim;

  std::ostringstream csv;
  csv.precision(12);
  csv << "n,variant,mean,mse,var,oracle\n";
  for (std::int64_t n : n_list) {
    for (const Variant& variant : variants) {
      std::vector<double> estimates(static_cast<std::size_t>(trials));
      edge::parallel_for_index(
          trials,
          [&](std::int64_t trial) {
            const std::uint64_t data_seed = edge::sub_seed(
                est.seed, 0xDA7A ^ static_cast<std::uint64_t>(n * 1315423911 + trial));
            const std::uint64_t est_seed = edge::sub_seed(
                est.seed, 0xE57 ^ static_cast<std::uint64_t>(n * 2654435761 + trial));
            const edge::SampleBatch batch = edge::generate(family, n, data_seed);
            double value;
            if (variant.ensemble) {
              edge::EnsembleOptions opts;
              opts.t_values = est.t_values;
              opts.degree = est.degree;
              opts.g = g;
              opts.seed = est_seed;
              opts.mode = mode;
              opts.c_h = est.c_h;
              value = edge::edge_estimate(batch.x, batch.y, opts).estimate.value;
            } else {
              const double eps = variant.multiplier *
                                 std::pow(static_cast<double>(n), -1.0 / (1.0 + d_total));
              value = edge::mi_from_samples(batch.x, batch.y, eps, g, est_seed, mode, est.c_h)
                          .value;
            }
            estimates[static_cast<std::size_t>(trial)] = value;
          },
          threads);

      double sum = 0.0, sum_sq = 0.0, se = 0.0;
      for (double v : estimates) {
        sum += v;
        se += (v - oracle.value) * (v - oracle.value);
      }
      const double mean = sum / trials;
      for (double v : estimates) sum_sq += (v - mean) * (v - mean);
      csv << n << "," << variant.name << "," << mean << "," << se / trials << ","
          << sum_sq / trials << "," << oracle.value << "\n";
    }
  }
  write_text(out, csv.str());
  return 0;
}

// ------------------------------------------------------------ bench-runtime

int cmd_bench_runtime(const FamilyOpts& fam, const EstimatorOpts& est,
                      const std::vector<std::int64_t>& n_list, int reps,
                      const OutputOpts& out) {
  if (n_list.empty()) throw edge::ConfigError("bench-runtime: empty n list");
  if (reps < 1) throw edge::ConfigError("bench-runtime: reps must be >= 1");

  json cfg = estimator_config_json(est);
  cfg["bench"] = family_config_json(fam);
  cfg["n_list"] = n_list;
  cfg["reps"] = reps;
  echo_config("bench-runtime", cfg);

  const edge::SyntheticFamily family = make_family(fam);
  const edge::GeneratorFunction g = make_generator(est);
  const edge::HashMode mode = make_mode(est);

  auto run_once = [&](const edge::SampleBatch& batch, std::uint64_t seed) {
    edge::EnsembleOptions opts;
    opts.t_values = est.t_values;
    opts.degree = est.degree;
    opts.g = g;
    opts.seed = seed;
    opts.mode = mode;
    opts.c_h = est.c_h;
    return edge::edge_estimate(batch.x, batch.y, opts).estimate.value;
  };

  // warmup on the smallest n
  {
    const auto warm = edge::generate(family, n_list.front(), 1);
    volatile double sink = run_once(warm, 2);
    (void)sink;
  }

  std::ostringstream csv;
  csv.precision(12);
  csv << "n,wall_seconds,per_sample_seconds\n";
  for (std::int64_t n : n_list) {
    const auto batch = edge::generate(family, n, edge::sub_seed(est.seed, n));
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < reps; ++r) {
      const auto start = std::chrono::steady_clock::now();
      volatile double sink = run_once(batch, edge::sub_seed(est.seed, n + r));
      (void)sink;
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      best = std::min(best, secs);
    }
    csv << n << "," << best << "," << best / static_cast<double>(n) << "\n";
  }
  write_text(out, csv.str());
  return 0;
}

// ------------------------------------------------------------- solve-weights

int cmd_solve_weights(const std::vector<double>& t_values, int degree,
                      const OutputOpts& out) {
  if (t_values.empty()) throw edge::ConfigError("solve-weights: --t-values required");
  echo_config("solve-weights", json{{"t_values", t_values}, {"degree", degree}});
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(
      t_values.data(), static_cast<Eigen::Index>(t_values.size()));
  const Eigen::VectorXd w = edge::solve_weights(t, degree);
  json report{{"schema_version", edge::kReportSchemaVersion},
              {"t_values", t_values},
              {"degree", degree},
              {"weights", std::vector<double>(w.data(), w.data() + w.size())},
              {"norm", w.norm()}};
  if (out.format == "json" || out.format == "plain") {
    write_text(out, report.dump(2) + "\n");
  } else {
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,weight\n";
    for (Eigen::Index i = 0; i < w.size(); ++i) csv << t[i] << "," << w[i] << "\n";
    write_text(out, csv.str());
  }
  return 0;
}

// --------------------------------------------------------------- stream-demo

int cmd_stream_demo(const FamilyOpts& fam, const EstimatorOpts& est, std::int64_t n,
                    std::int64_t every, double const_epsilon, const OutputOpts& out) {
  if (n < 1) throw edge::ConfigError("stream-demo: n must be >= 1");
  if (every < 1) throw edge::ConfigError("stream-demo: --every must be >= 1");

  json cfg = estimator_config_json(est);
  cfg["bench"] = family_config_json(fam);
  cfg["n"] = n;
  cfg["every"] = every;
  cfg["epsilon"] = const_epsilon;
  echo_config("stream-demo", cfg);

  const edge::SyntheticFamily family = make_family(fam);
  const edge::SampleBatch batch = edge::generate(family, n, edge::sub_seed(est.seed, 0xfeed));
  const int d_total = static_cast<int>(batch.x.cols() + batch.y.cols());
  const edge::EpsilonSchedule schedule =
      const_epsilon > 0.0 ? edge::EpsilonSchedule::constant(const_epsilon)
                          : edge::EpsilonSchedule::bias_optimal(d_total);

  edge::StreamState state(schedule, make_generator(est), est.seed, make_mode(est), est.c_h);
  std::ostringstream csv;
  csv.precision(12);
  csv << "n,estimate,epsilon,rebuilds\n";
  for (std::int64_t i = 0; i < n; ++i) {
    const double v = state.push(batch.x.row(i).transpose(), batch.y.row(i).transpose());
    if ((i + 1) % every == 0 || i + 1 == n) {
      csv << (i + 1) << "," << v << "," << state.current_epsilon() << ","
          << state.rebuild_count() << "\n";
    }
  }
  const auto bytes = state.snapshot();
  edge::StreamState restored = edge::StreamState::restore(bytes);
  csv << "# snapshot_bytes=" << bytes.size()
      << " restored_estimate=" << restored.estimate() << "\n";
  write_text(out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EDGE: ensemble dependence-graph mutual information estimator"};
  app.require_subcommand(1);

  EstimatorOpts est;
  est.seed = env_seed_default();
  FamilyOpts fam;
  OutputOpts out;

  std::string x_path, y_path;
  double single_epsilon = 0.0;
  std::vector<std::int64_t> n_list{1000, 2000, 4000};
  int trials = 10;
  std::vector<std::string> variants{"ensemble", "single"};
  unsigned threads = 0;
  std::int64_t oracle_samples = 16'000'000;
  int reps = 3;
  std::int64_t stream_n = 2000;
  std::int64_t stream_every = 100;
  double stream_epsilon = 0.0;
  std::vector<double> sw_t;
  int sw_degree = 0;

  auto add_output = [&](CLI::App* cmd, std::initializer_list<std::string> formats) {
    cmd->add_option("--out", out.out, "Output path ('-' or empty for stdout)");
    cmd->add_option("--format", out.format, "Output format")
        ->check(CLI::IsMember(formats))
        ->capture_default_str();
  };

  CLI::App* estimate = app.add_subcommand("estimate", "Estimate MI from CSV matrices");
  estimate->add_option("--x", x_path, "CSV matrix of X samples")->required();
  estimate->add_option("--y", y_path, "CSV matrix of Y samples")->required();
  estimate
      ->add_option("--epsilon,--single-epsilon", single_epsilon,
                   "Skip the ensemble and run the base estimator at this bandwidth")
      ->capture_default_str();
  add_estimator_options(estimate, est);
  add_output(estimate, {"plain", "json"});

  CLI::App* bench_mse = app.add_subcommand("bench-mse", "MSE sweep against the oracle");
  add_family_options(bench_mse, fam);
  add_estimator_options(bench_mse, est);
  bench_mse->add_option("--n-list", n_list, "Sample sizes")->delimiter(',');
  bench_mse->add_option("--trials", trials, "Trials per n (>= 2)")->capture_default_str();
  bench_mse->add_option("--variants", variants, "ensemble|single|single:<mult>")
      ->delimiter(',');
  bench_mse->add_option("--threads", threads, "Worker threads (0 = hardware)");
  bench_mse->add_option("--oracle-samples", oracle_samples, "Oracle Monte-Carlo samples")
      ->capture_default_str();
  add_output(bench_mse, {"csv"});
  out.format = "plain";

  CLI::App* bench_rt = app.add_subcommand("bench-runtime", "Wall-time scaling sweep");
  add_family_options(bench_rt, fam);
  add_estimator_options(bench_rt, est);
  bench_rt->add_option("--n-list", n_list, "Sample sizes")->delimiter(',');
  bench_rt->add_option("--reps", reps, "Repetitions (min is reported)")
      ->capture_default_str();
  add_output(bench_rt, {"csv"});

  CLI::App* solve = app.add_subcommand("solve-weights", "Solve the ensemble weight system");
  solve->add_option("--t-values", sw_t, "Index grid")->delimiter(',')->required();
  solve->add_option("--degree", sw_degree, "Constraint order d")->required();
  add_output(solve, {"plain", "json", "csv"});

  CLI::App* demo = app.add_subcommand("stream-demo", "Online estimation demo");
  add_family_options(demo, fam);
  add_estimator_options(demo, est);
  demo->add_option("--n", stream_n, "Pairs to stream")->capture_default_str();
  demo->add_option("--every", stream_every, "Emit cadence")->capture_default_str();
  demo->add_option("--epsilon", stream_epsilon,
                   "Constant bandwidth (0 = N^{-1/(1+d)} schedule)")
      ->capture_default_str();
  add_output(demo, {"csv"});

  try {
    app.parse(argc, argv);
    if (estimate->parsed()) return cmd_estimate(x_path, y_path, est, single_epsilon, out);
    if (bench_mse->parsed()) {
      if (out.format == "plain") out.format = "csv";
      return cmd_bench_mse(fam, est, n_list, trials, variants, threads, oracle_samples, out);
    }
    if (bench_rt->parsed()) {
      if (out.format == "plain") out.format = "csv";
      return cmd_bench_runtime(fam, est, n_list, reps, out);
    }
    if (solve->parsed()) return cmd_solve_weights(sw_t, sw_degree, out);
    if (demo->parsed()) {
      if (out.format == "plain") out.format = "csv";
      return cmd_stream_demo(fam, est, stream_n, stream_every, stream_epsilon, out);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  } catch (const edge::InvalidInputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const edge::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const edge::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
