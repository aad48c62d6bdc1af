// Command-line front end: run, bounds, validate-concentration, oracle.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "transrad/algorithms.hpp"
#include "transrad/concentration.hpp"
#include "transrad/error.hpp"
#include "transrad/graph.hpp"
#include "transrad/harness.hpp"
#include "transrad/rademacher.hpp"
#include "transrad/riskbounds.hpp"

namespace {

using namespace transrad;

void print_kv(const std::string& key, double value) { std::printf("%s = %.17g\n", key.c_str(), value); }

int cmd_run(const std::string& config_path, std::uint64_t seed,
            const std::map<std::string, std::string>& overrides) {
  ExperimentConfig config = parse_config_file(config_path);
  for (const auto& [key, value] : overrides) apply_config_value(config, key, value);
  config.seed = seed;
  const ExperimentResult result = run_experiment(config);

  if (config.output.empty()) {
    std::cout << format_csv(result.rows);
  } else {
    emit_csv(result.rows, config.output);
    std::filesystem::path meta = config.output;
    meta += ".meta.json";
    write_metadata(config, result, meta);
    std::cerr << "wrote " << config.output.string() << " and " << meta.string() << "\n";
  }
  std::fprintf(stderr, "m=%zu u=%zu test_01=%.4f empirical_margin=%.4f\n", result.m, result.u,
               result.errors.test_01, result.errors.empirical_margin);
  for (const BoundReport& b : result.theorem2) {
    std::fprintf(stderr, "bound[%s] complexity=%.6g total=%.6g\n", to_string(b.complexity.method),
                 b.complexity.value, b.total);
  }
  return 0;
}

struct BoundsArgs {
  std::size_t m = 0;
  std::size_t u = 0;
  double delta = 0.05;
  double gamma = 1.0;
  double empirical = 0.0;
  std::optional<double> complexity;
  std::optional<double> r_ind;
  std::optional<double> mu1;
  std::optional<double> frobenius;
  std::optional<double> mu2;
  std::optional<double> trace;
};

int cmd_bounds(const BoundsArgs& a) {
  const SlackConstants k = slack_constants(a.m, a.u);
  print_kv("Q", k.q_const);
  print_kv("S", k.s_const);
  print_kv("c0", k.c0);
  print_kv("p0", default_rademacher_p(a.m, a.u));
  const double slack = theorem1_slack(a.m, a.u, 0.0, 1.0, a.delta);
  print_kv("theorem1_slack", slack);

  std::optional<double> complexity = a.complexity;
  const double mu_scale = 2.0 / (static_cast<double>(a.m) * static_cast<double>(a.u));
  if (a.mu1 && a.frobenius) {
    const double g = *a.mu1 * std::sqrt(mu_scale) * *a.frobenius;
    print_kv("generic_eq22", g);
    if (!complexity) complexity = g;
  }
  if (a.mu2 && a.trace) {
    const double kb = *a.mu2 * std::sqrt(mu_scale * *a.trace);
    print_kv("kernel_eq25", kb);
    if (!complexity) complexity = kb;
  }
  if (complexity) {
    ComplexityEstimate est;
    est.value = *complexity;
    est.p = default_rademacher_p(a.m, a.u);
    const BoundReport r = theorem2_bound(a.empirical, est, a.gamma, a.m, a.u, a.delta);
    print_kv("slack_sqrt_min", r.slack_sqrt_min);
    print_kv("slack_confidence", r.slack_confidence);
    print_kv("theorem2_total", r.total);
    print_kv("theorem2_total_clipped", r.total_clipped);
  }
  print_kv("full_sample_eq17", full_sample_translate(a.empirical, slack, a.m, a.u));
  if (a.r_ind) print_kv("inductive_eq16", inductive_bound_eq16(a.empirical, *a.r_ind, a.gamma, a.m, a.delta));
  return 0;
}

std::vector<int> random_marking(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::vector<int> g(n);
  for (int& x : g) x = rng.uniform01() < 0.5 ? 1 : 0;
  return g;
}

int cmd_validate(const std::vector<std::pair<std::size_t, std::size_t>>& cases, std::size_t samples,
                 std::uint64_t seed) {
  std::vector<double> eps;
  for (int i = 1; i <= 10; ++i) eps.push_back(0.05 * i);
  std::size_t violations = 0;
  std::printf("m,u,epsilon,test_minus_train_empirical,test_minus_train_bound,train_mean_empirical,train_mean_bound,serfling_bound\n");
  std::uint64_t stream = 0;
  for (const auto& [m, u] : cases) {
    const std::vector<int> g = random_marking(m + u, seed, 1000 + stream++);
    const EmpiricalTail t3 = empirical_tail(test_minus_train_mean(g), m, u, eps, samples, seed);
    const EmpiricalTail t4 = empirical_tail(train_mean(g), m, u, eps, samples, seed);
    for (std::size_t i = 0; i < eps.size(); ++i) {
      auto bound = [&](TailKind kind) {
        return std::min(1.0, tail_bound({kind, m, u, std::nullopt, eps[i]}));
      };
      const double b4 = bound(TailKind::kEq4);
      const double b5 = bound(TailKind::kEq5);
      const double bs = bound(TailKind::kSerfling);
      if (t3.tail[i] > b4) ++violations;
      if (t4.tail[i] > b5) ++violations;
      if (t4.tail[i] > bs) ++violations;
      std::printf("%zu,%zu,%.2f,%.6f,%.6f,%.6f,%.6f,%.6f\n", m, u, eps[i], t3.tail[i], b4, t4.tail[i], b5, bs);
    }
  }
  std::fprintf(stderr, "violations: %zu\n", violations);
  return violations == 0 ? 0 : 4;
}

int cmd_oracle(std::size_t m, std::size_t u, std::uint64_t seed, const std::string& family,
               std::optional<double> p, std::size_t mc_samples, double delta) {
  const std::size_t n = m + u;
  if (n > kExactOracleMaxSize) throw Error(ErrorCode::kTooLarge, "oracle needs m+u <= 12");
  CounterRng rng(seed, 0);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 3);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 0.05 + rng.uniform01();
  const GraphBundle graph = knn_graph(cosine_similarity(x), n - 1);
  const Eigen::MatrixXd u_mat = cm_kernel(graph, 0.5);
  const Eigen::VectorXd sv = singular_values(u_mat);
  const double lambda_max = sv.maxCoeff();
  const double prob = p ? *p : default_rademacher_p(m, u);

  std::unique_ptr<SupremumOracle> oracle;
  double mu = std::sqrt(static_cast<double>(m));
  if (family == "vanilla") {
    oracle = std::make_unique<VanillaSupremum>(u_mat, m);
  } else if (family == "ball") {
    oracle = std::make_unique<BallSupremum>(u_mat, mu);
  } else if (family == "kernel") {
    oracle = std::make_unique<KernelSupremum>(u_mat, mu);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "family must be vanilla, ball or kernel");
  }
  print_kv("p", prob);
  print_kv("exact_oracle", exact_oracle(*oracle, m, u, prob));
  print_kv("generic_eq22", generic_ulr_bound(u_mat, mu, m, u));
  print_kv("kernel_eq25", kernel_ulr_bound(u_mat, mu, m, u));
  const double range = family == "kernel" ? mu * std::sqrt(lambda_max) * std::sqrt(static_cast<double>(n))
                                          : std::sqrt(static_cast<double>(n)) * mu * lambda_max;
  const ComplexityEstimate est =
      mc_complexity_with_range(*oracle, m, u, mc_samples, delta, seed + 1, range, true, prob);
  print_kv("mc_mean", *est.mc_mean);
  print_kv("mc_lower", *est.mc_lower);
  print_kv("mc_upper", est.value);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transductive Rademacher complexity toolkit"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the truncation sweep described by a configuration file");
  std::string config_path;
  std::uint64_t seed = 0;
  run->add_option("config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "master seed")->required();
  std::map<std::string, std::string> overrides;
  const std::vector<std::string> keys = {"dataset_path", "dataset_schema", "train_fraction", "k_neighbors",
                                         "algorithm", "beta", "c", "r", "mc_samples", "delta", "gamma",
                                         "truncation_grid", "output"};
  std::map<std::string, std::string> flag_values;
  for (const std::string& key : keys) {
    std::string flag = "--" + key;
    for (char& ch : flag) {
      if (ch == '_') ch = '-';
    }
    run->add_option(flag, flag_values[key], "override " + key);
  }

  auto* bounds = app.add_subcommand("bounds", "Evaluate the closed-form bounds for given sizes");
  BoundsArgs ba;
  bounds->add_option("--m", ba.m, "training points")->required();
  bounds->add_option("--u", ba.u, "test points")->required();
  bounds->add_option("--delta", ba.delta, "confidence parameter");
  bounds->add_option("--gamma", ba.gamma, "margin");
  bounds->add_option("--empirical", ba.empirical, "empirical margin error");
  bounds->add_option("--complexity", ba.complexity, "Rademacher complexity value");
  bounds->add_option("--r-ind", ba.r_ind, "inductive Rademacher complexity for the comparison bound");
  bounds->add_option("--mu1", ba.mu1, "bound on ||alpha||");
  bounds->add_option("--frobenius", ba.frobenius, "||U||_F");
  bounds->add_option("--mu2", ba.mu2, "bound on sqrt(alpha^T U alpha)");
  bounds->add_option("--trace", ba.trace, "trace(U)");

  auto* validate = app.add_subcommand("validate-concentration",
                                      "Compare empirical permutation tails with the analytic bounds");
  std::size_t vm = 0;
  std::size_t vu = 0;
  std::size_t vsamples = 10000;
  std::uint64_t vseed = 1;
  validate->add_option("--m", vm, "training points (default: the three standard cases)");
  validate->add_option("--u", vu, "test points");
  validate->add_option("--samples", vsamples, "partitions per case");
  validate->add_option("--seed", vseed, "seed");

  auto* oracle = app.add_subcommand("oracle", "Exact enumeration on a random tiny CM instance");
  std::size_t om = 2;
  std::size_t ou = 4;
  std::uint64_t oseed = 1;
  std::string family = "vanilla";
  std::optional<double> op;
  std::size_t osamples = 2000;
  double odelta = 0.05;
  oracle->add_option("--m", om, "training points");
  oracle->add_option("--u", ou, "test points");
  oracle->add_option("--seed", oseed, "seed");
  oracle->add_option("--family", family, "vanilla, ball or kernel");
  oracle->add_option("--p", op, "Rademacher parameter (default mu/(m+u)^2)");
  oracle->add_option("--mc-samples", osamples, "Monte-Carlo draws for comparison");
  oracle->add_option("--delta", odelta, "confidence parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      for (const auto& [key, value] : flag_values) {
        if (!value.empty()) overrides[key] = value;
      }
      return cmd_run(config_path, seed, overrides);
    }
    if (bounds->parsed()) return cmd_bounds(ba);
    if (validate->parsed()) {
      std::vector<std::pair<std::size_t, std::size_t>> cases = {{10, 10}, {10, 40}, {40, 10}};
      if (vm > 0 || vu > 0) cases = {{vm, vu}};
      return cmd_validate(cases, vsamples, vseed);
    }
    if (oracle->parsed()) return cmd_oracle(om, ou, oseed, family, op, osamples, odelta);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
