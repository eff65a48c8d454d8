#pragma once

// Experiment orchestration: configs, (n, k, d) sweeps with seeded trials,
// CSV persistence, and JSON views of every report type.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dlr/bounds.hpp"
#include "dlr/estimator.hpp"
#include "dlr/fisher.hpp"
#include "dlr/model.hpp"
#include "json.hpp"

namespace dlr {

enum class DataModel {
  class_conditional,  // Y ~ unif, X_j | Y iid (the construction the group scheme is exact for)
  logistic,           // X ~ unif{-1,1}^d, Y ~ logistic(theta)
};

std::string to_string(DataModel m);
DataModel data_model_from_string(const std::string& s);

struct ThetaSource {
  enum class Kind { explicit_vector, random_ball };
  Kind kind = Kind::random_ball;
  Vector values;
  double radius = 1.0;
  std::uint64_t seed = 1;

  /// Explicit vectors must match d; random-ball draws one parameter per d,
  /// uniform in the ball, shared by every cell and trial with that d.
  Parameter resolve(std::size_t d) const;
};

struct ExperimentConfig {
  DataModel data_model = DataModel::class_conditional;
  ThetaSource theta;
  std::vector<std::size_t> n_grid;
  std::vector<unsigned> k_grid;
  std::vector<std::size_t> d_grid;
  std::size_t trials = 1;
  SGDConfig sgd;
  std::uint64_t master_seed = 0;
  std::filesystem::path output;
  bool compute_trace_msg = false;
  bool record_wall_time = false;      // wall_ms breaks byte-identical reruns, so it is opt-in
  std::optional<double> sigma2;       // for the thm1 column; defaults to 8/3 (hypercube bound)
  std::size_t threads = 0;            // 0: DLR_THREADS or hardware concurrency
  std::size_t mc_samples = 200000;    // excess-risk draws when d > 16

  /// Throws ConfigError.
  void validate() const;
};

/// Strict: unknown keys and wrong types raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
/// TOML (.toml) or its JSON mirror (.json), chosen by extension.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_toml_config(const std::string& text);
/// TOML document as the equivalent JSON tree.
nlohmann::json toml_text_to_json(const std::string& text);

struct Cell {
  std::size_t n = 0;
  unsigned k = 0;
  std::size_t d = 0;
};

struct RunRecord {
  Cell cell;
  std::size_t cell_index = 0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double l2_error = 0.0;          // ||theta_hat - theta||^2
  double excess_risk = 0.0;
  std::optional<double> trace_msg;
  std::optional<double> wall_ms;
  Vector theta_true;
  Vector theta_hat;
  std::vector<std::size_t> empty_groups;
};

struct CellSummary {
  Cell cell;
  std::size_t trials = 0;
  double l2_mean = 0.0;
  double l2_stderr = 0.0;
  double excess_mean = 0.0;
  double excess_stderr = 0.0;
  std::optional<double> trace_msg;
  TheoremScalings scalings;
};

struct SkippedCell {
  Cell cell;
  std::string reason;
};

struct SweepResult {
  std::vector<RunRecord> records;     // ordered by (cell, trial)
  std::vector<CellSummary> summaries; // one per evaluated cell
  std::vector<SkippedCell> skipped;
};

std::vector<Cell> expand_grid(const ExperimentConfig& config);
std::uint64_t trial_seed(std::uint64_t master, std::size_t cell_index, std::size_t trial);

/// One (cell, trial): draw data, encode with the group partition, estimate,
/// score both losses. Pure function of its arguments.
RunRecord run_trial(const ExperimentConfig& config, const Cell& cell, std::size_t cell_index, std::size_t trial);

/// Per-sample message Fisher trace averaged over the groups of the cell,
/// at theta_true with the X-law held fixed.
double cell_trace_msg(const ExperimentConfig& config, const Cell& cell);

/// Invalid cells are skipped with a reason. `threads` overrides config.threads.
SweepResult run_sweep(const ExperimentConfig& config, std::optional<std::size_t> threads = std::nullopt);

// ---- CSV ----------------------------------------------------------------------

/// Column order of the results file.
const std::vector<std::string>& csv_columns();

/// Throws Error (naming the path and cause) on I/O failure or when the
/// result holds no records; no file is created in that case.
void write_results(const SweepResult& result, const std::filesystem::path& path);
std::string results_to_csv(const SweepResult& result);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  const std::string& at(std::size_t row, const std::string& column) const;
};

CsvTable read_csv(const std::filesystem::path& path);

// ---- JSON views -------------------------------------------------------------------

nlohmann::json to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const nlohmann::json& j);
nlohmann::json to_json(const FisherReport& r);
nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const RunRecord& r);
nlohmann::json to_json(const CellSummary& s);

}  // namespace dlr
