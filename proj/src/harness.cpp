#include "transrad/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <sstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "transrad/algorithms.hpp"
#include "transrad/concentration.hpp"
#include "transrad/error.hpp"
#include "transrad/graph.hpp"
#include "transrad/rademacher.hpp"

namespace transrad {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw Error(ErrorCode::kInvalidArgument, key + ": '" + v + "' is not a number");
  }
  return out;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kInvalidArgument, key + ": '" + v + "' is not a nonnegative integer");
  }
  return out;
}

std::vector<std::size_t> to_grid(const std::string& key, const std::string& v) {
  std::vector<std::size_t> grid;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    grid.push_back(static_cast<std::size_t>(to_count(key, item)));
  }
  if (grid.empty()) throw Error(ErrorCode::kInvalidArgument, key + ": empty list");
  return grid;
}

std::vector<std::size_t> resolve_grid(const std::vector<std::size_t>& requested, std::size_t full) {
  if (requested.empty()) return default_truncation_grid(full);
  for (std::size_t t : requested) {
    if (t < 1 || t > full) {
      throw Error(ErrorCode::kInvalidArgument, "truncation t=" + std::to_string(t) +
                                                   " outside [1, " + std::to_string(full) + "]");
    }
  }
  return requested;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  CounterRng rng(seed, tag);
  return rng();
}

// The supremum oracle and Monte-Carlo range for one truncation level.
struct Truncation {
  std::unique_ptr<SupremumOracle> oracle;
  double sup_bound = 0.0;
  std::optional<double> generic;
  std::optional<double> kernel;
};

ResultRow evaluate(std::size_t t, const Truncation& tr, const ExperimentConfig& config,
                   std::size_t m, std::size_t u, std::uint64_t mc_seed,
                   std::optional<ComplexityEstimate>* mc_out = nullptr) {
  ResultRow row;
  row.t = t;
  row.generic_eq22 = tr.generic;
  row.kernel_eq25 = tr.kernel;
  const ComplexityEstimate est = mc_complexity_with_range(*tr.oracle, m, u, config.mc_samples,
                                                          config.delta, mc_seed, tr.sup_bound, true);
  row.mc_upper = est.value;
  row.mc_lower = est.mc_lower;
  if (m + u <= kExactOracleMaxSize) {
    row.exact_oracle = exact_oracle(*tr.oracle, m, u, default_rademacher_p(m, u));
  }
  if (mc_out) *mc_out = est;
  return row;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace

const char* to_string(DatasetSchema schema) noexcept {
  switch (schema) {
    case DatasetSchema::kVoting: return "voting";
    case DatasetSchema::kPima: return "pima";
    case DatasetSchema::kGenericCsv: return "generic-csv";
  }
  return "unknown";
}

const char* to_string(Algorithm algorithm) noexcept {
  switch (algorithm) {
    case Algorithm::kCm: return "cm";
    case Algorithm::kSgt: return "sgt";
    case Algorithm::kBelkin: return "belkin";
  }
  return "unknown";
}

DatasetSchema parse_schema(const std::string& text) {
  if (text == "voting") return DatasetSchema::kVoting;
  if (text == "pima") return DatasetSchema::kPima;
  if (text == "generic-csv") return DatasetSchema::kGenericCsv;
  throw Error(ErrorCode::kInvalidArgument, "dataset_schema must be voting, pima or generic-csv, got '" + text + "'");
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "cm") return Algorithm::kCm;
  if (text == "sgt") return Algorithm::kSgt;
  if (text == "belkin") return Algorithm::kBelkin;
  throw Error(ErrorCode::kInvalidArgument, "algorithm must be cm, sgt or belkin, got '" + text + "'");
}

void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "dataset_path") {
    config.dataset_path = value;
  } else if (key == "dataset_schema") {
    config.dataset_schema = parse_schema(value);
  } else if (key == "train_fraction") {
    config.train_fraction = to_double(key, value);
  } else if (key == "k_neighbors") {
    config.k_neighbors = static_cast<std::size_t>(to_count(key, value));
  } else if (key == "algorithm") {
    config.algorithm = parse_algorithm(value);
  } else if (key == "beta") {
    config.beta = to_double(key, value);
  } else if (key == "c") {
    config.c = to_double(key, value);
  } else if (key == "r") {
    config.r = static_cast<std::size_t>(to_count(key, value));
  } else if (key == "mc_samples") {
    config.mc_samples = static_cast<std::size_t>(to_count(key, value));
  } else if (key == "delta") {
    config.delta = to_double(key, value);
  } else if (key == "gamma") {
    config.gamma = to_double(key, value);
  } else if (key == "seed") {
    config.seed = to_count(key, value);
  } else if (key == "truncation_grid") {
    config.truncation_grid = to_grid(key, value);
  } else if (key == "output") {
    config.output = value;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown configuration key '" + key + "'");
  }
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open configuration " + path.string());
  ExperimentConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "seed") {
      throw Error(ErrorCode::kInvalidArgument,
                  path.string() + ":" + std::to_string(lineno) + ": the seed is passed with --seed");
    }
    try {
      apply_config_value(config, key, line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  const auto base = path.parent_path();
  if (!config.dataset_path.empty() && config.dataset_path.is_relative()) {
    config.dataset_path = base / config.dataset_path;
  }
  if (!config.output.empty() && config.output.is_relative()) config.output = base / config.output;
  return config;
}

void validate_config(const ExperimentConfig& config) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::kInvalidArgument, msg); };
  if (config.dataset_path.empty()) throw Error(ErrorCode::kMissingParameter, "dataset_path is required");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) bad("train_fraction must lie in (0, 1)");
  if (config.k_neighbors < 1) bad("k_neighbors must be positive");
  if (config.mc_samples < 1) bad("mc_samples must be positive");
  if (!(config.delta > 0.0 && config.delta < 1.0)) bad("delta must lie in (0, 1)");
  if (!(config.gamma > 0.0)) bad("gamma must be positive");
  if (!config.seed) throw Error(ErrorCode::kMissingParameter, "a seed is required");
  switch (config.algorithm) {
    case Algorithm::kCm:
      if (!(config.beta > 0.0 && config.beta < 1.0)) bad("beta must lie in (0, 1)");
      break;
    case Algorithm::kSgt:
      if (config.r < 1) bad("r must be positive");
      [[fallthrough]];
    case Algorithm::kBelkin:
      if (!config.c) throw Error(ErrorCode::kMissingParameter, "c is required for sgt and belkin");
      if (!(*config.c > 0.0)) bad("c must be positive");
      break;
  }
}

Eigen::MatrixXd spectral_truncate(const Eigen::MatrixXd& u_mat, std::size_t t) {
  return spectral_truncate(sym_eig(u_mat), t);
}

Eigen::MatrixXd spectral_truncate(const EigenDecomposition& eig, std::size_t t) {
  const auto n = static_cast<std::size_t>(eig.eigenvalues.size());
  if (t < 1 || t > n) {
    throw Error(ErrorCode::kInvalidArgument,
                "truncation t=" + std::to_string(t) + " outside [1, " + std::to_string(n) + "]");
  }
  const auto ti = static_cast<Eigen::Index>(t);
  const auto v = eig.eigenvectors.leftCols(ti);
  return v * eig.eigenvalues.head(ti).asDiagonal() * v.transpose();
}

std::vector<std::size_t> default_truncation_grid(std::size_t full) {
  std::vector<std::size_t> grid;
  for (std::size_t t : {1, 2, 5, 10, 20, 50, 100, 200, 400}) {
    if (t < full) grid.push_back(t);
  }
  if (full >= 1) grid.push_back(full);
  return grid;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  const auto started = std::chrono::steady_clock::now();

  const FullSample sample = load_dataset(config.dataset_path, config.dataset_schema);
  const std::size_t n = sample.size();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "dataset needs at least two points");
  const auto m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(config.train_fraction * static_cast<double>(n))));
  if (m >= n) throw Error(ErrorCode::kInvalidArgument, "train_fraction leaves no test points");
  const std::size_t u = n - m;
  if (config.k_neighbors + 1 > n) throw Error(ErrorCode::kInvalidArgument, "k_neighbors must be below the sample size");

  ExperimentResult res;
  res.seed = *config.seed;
  res.mc_seed = derive_seed(res.seed, 1);
  res.m = m;
  res.u = u;
  const SlackConstants k = slack_constants(m, u);
  res.q_const = k.q_const;
  res.s_const = k.s_const;
  res.c0 = k.c0;
  res.p0 = default_rademacher_p(m, u);
  res.feature_count = static_cast<std::size_t>(sample.features.cols());
  res.preprocessing = preprocessing_note(config.dataset_schema);

  const Partition part = sample_partition(n, m, res.seed, 0);
  const LabelVector tau(part, sample.labels);
  const GraphBundle graph = knn_graph(cosine_similarity(graph_features(sample, config.dataset_schema)), config.k_neighbors);
  res.component_count = graph.component_count;

  UlrModel model;
  std::size_t full = 0;
  std::function<Truncation(std::size_t)> truncate;
  EigenDecomposition spectrum;  // eigenpairs of U in ascending order
  std::optional<double> generic_full;
  std::optional<double> kernel_full;

  switch (config.algorithm) {
    case Algorithm::kCm: {
      model = consistency_method(graph, tau, config.beta, true);
      spectrum = sym_eig(model.u_mat);
      full = n;
      truncate = [&](std::size_t t) {
        const auto ti = static_cast<Eigen::Index>(t);
        const Eigen::MatrixXd v = spectrum.eigenvectors.leftCols(ti);
        const Eigen::VectorXd lam = spectrum.eigenvalues.head(ti);
        const Eigen::VectorXd sv = lam.cwiseAbs();
        Truncation tr;
        tr.generic = generic_ulr_bound_from_spectrum({sv.data(), t}, *model.mu1, m, u);
        tr.kernel = kernel_ulr_bound_from_spectrum({lam.data(), t}, *model.mu2, m, u);
        tr.oracle = std::make_unique<VanillaSupremum>(v, lam, m);
        tr.sup_bound = std::sqrt(static_cast<double>(n)) * *model.mu1 * sv.maxCoeff();
        return tr;
      };
      break;
    }
    case Algorithm::kSgt: {
      if (graph.component_count != 1) {
        throw Error(ErrorCode::kDisconnectedGraph, "SGT needs a connected graph; increase k_neighbors");
      }
      model = sgt(graph, tau, *config.c, config.r, sym_eig(graph.lap_unnorm));
      full = config.r;
      truncate = [&](std::size_t t) {
        const Eigen::MatrixXd ut = model.u_mat.leftCols(static_cast<Eigen::Index>(t));
        const Eigen::VectorXd sv = singular_values(ut);
        Truncation tr;
        tr.generic = generic_ulr_bound_from_spectrum({sv.data(), static_cast<std::size_t>(sv.size())},
                                                     *model.mu1, m, u);
        tr.oracle = std::make_unique<BallSupremum>(ut, *model.mu1);
        tr.sup_bound = std::sqrt(static_cast<double>(n)) * *model.mu1 * sv.maxCoeff();
        return tr;
      };
      break;
    }
    case Algorithm::kBelkin: {
      const EigenDecomposition lap = sym_eig(graph.lap_unnorm);
      model = tikhonov_belkin(graph, tau, *config.c, lap);
      // U's spectrum in ascending order: the null space first, then 1/lambda
      // from the largest Laplacian eigenvalue down.
      const auto ni = static_cast<Eigen::Index>(n);
      const auto zi = static_cast<Eigen::Index>(graph.component_count);
      spectrum.eigenvalues.resize(ni);
      spectrum.eigenvectors.resize(ni, ni);
      for (Eigen::Index i = 0; i < zi; ++i) {
        spectrum.eigenvalues[i] = 0.0;
        spectrum.eigenvectors.col(i) = lap.eigenvectors.col(i);
      }
      for (Eigen::Index i = zi; i < ni; ++i) {
        const Eigen::Index src = ni - 1 - (i - zi);
        spectrum.eigenvalues[i] = 1.0 / lap.eigenvalues[src];
        spectrum.eigenvectors.col(i) = lap.eigenvectors.col(src);
      }
      full = n;
      truncate = [&](std::size_t t) {
        const auto ti = static_cast<Eigen::Index>(t);
        const Eigen::MatrixXd v = spectrum.eigenvectors.leftCols(ti);
        const Eigen::VectorXd lam = spectrum.eigenvalues.head(ti);
        Truncation tr;
        tr.kernel = kernel_ulr_bound_from_spectrum({lam.data(), t}, *model.mu2, m, u);
        tr.oracle = std::make_unique<KernelSupremum>(v, lam, *model.mu2);
        tr.sup_bound = *model.mu2 * std::sqrt(std::max(0.0, lam.maxCoeff())) *
                       std::sqrt(static_cast<double>(n));
        return tr;
      };
      break;
    }
  }

  res.errors = score_errors(model.h, sample, part, config.gamma);

  struct Level {
    ResultRow row;
    std::optional<ComplexityEstimate> est;
    std::optional<double> generic;
    std::optional<double> kernel;
  };
  auto run_level = [&](std::size_t t) {
    const Truncation tr = truncate(t);
    Level lv;
    lv.row = evaluate(t, tr, config, m, u, res.mc_seed, &lv.est);
    lv.generic = tr.generic;
    lv.kernel = tr.kernel;
    return lv;
  };

  // Levels are independent and every Monte-Carlo draw owns its stream, so the
  // rows do not depend on scheduling. Results are collected in grid order.
  const std::vector<std::size_t> grid = resolve_grid(config.truncation_grid, full);
  const std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<ComplexityEstimate> mc_full;
  for (std::size_t begin = 0; begin < grid.size(); begin += workers) {
    const std::size_t end = std::min(grid.size(), begin + workers);
    std::vector<std::future<Level>> pending;
    for (std::size_t i = begin; i < end; ++i) pending.push_back(std::async(std::launch::async, run_level, grid[i]));
    for (std::size_t i = begin; i < end; ++i) {
      Level lv = pending[i - begin].get();
      if (grid[i] == full) {
        mc_full = lv.est;
        generic_full = lv.generic;
        kernel_full = lv.kernel;
      }
      res.rows.push_back(std::move(lv.row));
    }
  }
  if (!mc_full) {
    const Truncation tr = truncate(full);
    std::optional<ComplexityEstimate> est;
    evaluate(full, tr, config, m, u, res.mc_seed, &est);
    mc_full = est;
    generic_full = tr.generic;
    kernel_full = tr.kernel;
  }

  const double p0 = res.p0;
  auto add_bound = [&](ComplexityMethod method, double value) {
    ComplexityEstimate est;
    est.method = method;
    est.value = value;
    est.p = p0;
    res.theorem2.push_back(theorem2_bound(res.errors.empirical_margin, est, config.gamma, m, u, config.delta));
  };
  if (generic_full) add_bound(ComplexityMethod::kGenericEq22, *generic_full);
  if (kernel_full) add_bound(ComplexityMethod::kKernelEq25, *kernel_full);
  res.theorem2.push_back(theorem2_bound(res.errors.empirical_margin, *mc_full, config.gamma, m, u, config.delta));

  res.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return res;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out = "t,mc_lower,mc_upper,generic_eq22,kernel_eq25,exact_oracle\n";
  auto cell = [&](const std::optional<double>& v) {
    out += ',';
    if (v) out += format_double(*v);
  };
  for (const ResultRow& r : rows) {
    out += std::to_string(r.t);
    cell(r.mc_lower);
    cell(r.mc_upper);
    cell(r.generic_eq22);
    cell(r.kernel_eq25);
    cell(r.exact_oracle);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  write_file(path, format_csv(rows));
}

void write_metadata(const ExperimentConfig& config, const ExperimentResult& result,
                    const std::filesystem::path& path) {
  using nlohmann::json;
  json cfg = {
      {"dataset_path", config.dataset_path.string()},
      {"dataset_schema", to_string(config.dataset_schema)},
      {"train_fraction", config.train_fraction},
      {"k_neighbors", config.k_neighbors},
      {"algorithm", to_string(config.algorithm)},
      {"mc_samples", config.mc_samples},
      {"delta", config.delta},
      {"gamma", config.gamma},
      {"truncation_grid", config.truncation_grid},
  };
  if (config.algorithm == Algorithm::kCm) cfg["beta"] = config.beta;
  if (config.algorithm == Algorithm::kSgt) cfg["r"] = config.r;
  if (config.c) cfg["c"] = *config.c;

  json bounds = json::array();
  for (const BoundReport& b : result.theorem2) {
    json e = {
        {"method", to_string(b.complexity.method)},
        {"complexity", b.complexity.value},
        {"empirical_margin_error", b.empirical_margin_error},
        {"slack_sqrt_min", b.slack_sqrt_min},
        {"slack_confidence", b.slack_confidence},
        {"total", b.total},
        {"total_clipped", b.total_clipped},
    };
    if (b.complexity.mc_mean) e["mc_mean"] = *b.complexity.mc_mean;
    if (b.complexity.mc_lower) e["mc_lower"] = *b.complexity.mc_lower;
    bounds.push_back(std::move(e));
  }

  const ErrorReport& er = result.errors;
  json meta = {
      {"config", cfg},
      {"n", result.m + result.u},
      {"m", result.m},
      {"u", result.u},
      {"Q", result.q_const},
      {"S", result.s_const},
      {"c0", result.c0},
      {"p0", result.p0},
      {"seed", result.seed},
      {"mc_seed", result.mc_seed},
      {"feature_count", result.feature_count},
      {"component_count", result.component_count},
      {"preprocessing", result.preprocessing},
      {"similarity", "cosine, negatives clamped to 0, symmetrized kNN with ties kept"},
      {"error_report",
       {{"gamma", er.gamma},
        {"empirical_01", er.empirical_01},
        {"empirical_margin", er.empirical_margin},
        {"test_01", er.test_01},
        {"test_margin", er.test_margin},
        {"full_sample_01", er.full_sample_01},
        {"full_sample_margin", er.full_sample_margin}}},
      {"theorem2", bounds},
      {"csv_columns", {"t", "mc_lower", "mc_upper", "generic_eq22", "kernel_eq25", "exact_oracle"}},
      {"wall_clock_seconds", result.wall_clock_seconds},
  };
  write_file(path, meta.dump(2) + "\n");
}

}  // namespace transrad
