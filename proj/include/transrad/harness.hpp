#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "transrad/core.hpp"
#include "transrad/riskbounds.hpp"
#include "transrad/spectral.hpp"

namespace transrad {

enum class DatasetSchema { kVoting, kPima, kGenericCsv };
enum class Algorithm { kCm, kSgt, kBelkin };

const char* to_string(DatasetSchema schema) noexcept;
const char* to_string(Algorithm algorithm) noexcept;
DatasetSchema parse_schema(const std::string& text);
Algorithm parse_algorithm(const std::string& text);

/// Voting: 16 y/n/? attributes mapped to +1/-1/0 and a democrat(+1) /
/// republican(-1) label, first or last. Pima: 8 numeric attributes, z-scored,
/// label 1/0 or tested_positive/tested_negative. Generic CSV: numeric
/// features, last column a +-1 label, optional header row. Blank lines and
/// lines starting with '#' or '@' are skipped.
FullSample load_dataset(const std::filesystem::path& path, DatasetSchema schema);

/// Features fed to cosine similarity. Voting gets a constant extra attribute
/// because '?' maps to 0 and a record may have no recorded vote at all.
Eigen::MatrixXd graph_features(const FullSample& sample, DatasetSchema schema);

/// One-line description of the preprocessing applied for `schema`.
std::string preprocessing_note(DatasetSchema schema);

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  DatasetSchema dataset_schema = DatasetSchema::kGenericCsv;
  double train_fraction = 1.0 / 3.0;
  std::size_t k_neighbors = 10;
  Algorithm algorithm = Algorithm::kCm;
  double beta = 0.5;
  std::optional<double> c;
  std::size_t r = 40;
  std::size_t mc_samples = 100000;
  double delta = 0.05;
  double gamma = 1.0;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> truncation_grid;  // empty: default grid
  std::filesystem::path output;              // empty: no file output
};

/// Sets one `key = value` pair; throws kInvalidArgument for unknown keys or bad values.
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Reads a `key = value` file. Relative dataset and output paths are resolved
/// against the file's directory.
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Throws kInvalidArgument / kMissingParameter for an unusable configuration.
void validate_config(const ExperimentConfig& config);

/// sum over the t smallest eigenpairs of lambda_i u_i u_i^T.
Eigen::MatrixXd spectral_truncate(const Eigen::MatrixXd& u_mat, std::size_t t);
Eigen::MatrixXd spectral_truncate(const EigenDecomposition& eig, std::size_t t);

struct ResultRow {
  std::size_t t = 0;
  std::optional<double> mc_lower;
  std::optional<double> mc_upper;
  std::optional<double> generic_eq22;
  std::optional<double> kernel_eq25;
  std::optional<double> exact_oracle;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::size_t m = 0;
  std::size_t u = 0;
  double q_const = 0.0;
  double s_const = 0.0;
  double c0 = 0.0;
  double p0 = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t mc_seed = 0;
  std::size_t feature_count = 0;
  std::size_t component_count = 0;
  std::string preprocessing;
  ErrorReport errors;
  std::vector<BoundReport> theorem2;  // one per complexity estimate at the full U
  double wall_clock_seconds = 0.0;
};

/// Default sweep {1, 2, 5, 10, 20, 50, 100, 200, 400, full} restricted to [1, full].
std::vector<std::size_t> default_truncation_grid(std::size_t full);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Header plus one row per result; 17 significant digits, empty cells for
/// values that were not computed.
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::string format_csv(const std::vector<ResultRow>& rows);

/// JSON sidecar with the configuration, constants, error report and bounds.
void write_metadata(const ExperimentConfig& config, const ExperimentResult& result,
                    const std::filesystem::path& path);

}  // namespace transrad
