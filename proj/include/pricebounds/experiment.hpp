#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pricebounds/bounds_cv.hpp"
#include "pricebounds/price_optimizer.hpp"

namespace pricebounds {

enum class Method { quantile, bootstrap, cross_validation };

std::string to_string(Method method);
Method method_from_string(const std::string& name);

/// Parameter values swept for one method. `param` names the column written
/// to the results: "q" (quantile), "kappa" or "confidence" (bootstrap),
/// "gamma" (cross-validation).
struct MethodSweep {
  Method method;
  std::string param;
  std::vector<double> values;
};

struct ExperimentConfig {
  std::vector<int> m_values{5};
  std::vector<int> n_values{1000};
  std::vector<double> delta_values{0.25};
  std::vector<MethodSweep> methods;
  int trials = 100;
  std::uint64_t master_seed = 1;
  std::string output_dir = "results";
  int workers = 0;  // 0: OpenMP default

  double pmin = 0.5;
  double pmax = 1.1;
  double price_mean = 0.8;
  double price_sd = 0.1;
  bool independent_noise = false;
  int n_bootstrap = 100;
  CvConfig cv;  // gamma is overridden by the sweep
  QpSolverConfig qp;
  bool record_timing = false;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Reads a JSON config and applies the PRICEBOUNDS_OUTPUT_DIR and
/// PRICEBOUNDS_WORKERS environment overrides.
ExperimentConfig load_config(const std::filesystem::path& path);
void apply_environment_overrides(ExperimentConfig& cfg);

inline constexpr const char* kOutputDirEnv = "PRICEBOUNDS_OUTPUT_DIR";
inline constexpr const char* kWorkersEnv = "PRICEBOUNDS_WORKERS";

/// One line of results.csv.
struct ResultRow {
  int m = 0;
  int n = 0;
  double delta = 0.0;
  Method method = Method::quantile;
  std::string sweep_param;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double rel_revenue = 0.0;
  double avg_width = 0.0;
  std::optional<double> time_bounds_s;
  std::vector<double> r2;           // per item, in-sample R^2 of the full-data fit
  std::vector<double> item_widths;  // per item, beta - alpha (scatter.csv only)
};

struct FlaggedRow {
  int m = 0;
  int n = 0;
  double delta = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string reason;
};

struct TrialOutcome {
  std::vector<ResultRow> rows;
  std::optional<FlaggedRow> flagged;
};

/// Seed of one trial; depends only on the master seed and the trial's own
/// coordinates, so adding grid points or trials never changes other rows.
std::uint64_t trial_seed(std::uint64_t master, int m, int n, double delta, int trial);

/// Generates the trial's dataset, computes p*, then every method and sweep
/// value. Bootstrap replicates are shared across the kappa sweep.
TrialOutcome run_trial(const ExperimentConfig& cfg, int m, int n, double delta, int trial,
                       std::uint64_t seed);

/// Re-executes one row from its recorded seed.
ResultRow replay_row(const ExperimentConfig& cfg, const ResultRow& recorded);

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<FlaggedRow> flagged;
  int max_items = 0;
  std::filesystem::path results_path;
};

/// Runs the whole grid. Writes run_config.json, results.csv, scatter.csv and
/// flagged.csv into the output directory. Completed trials are journaled to
/// results.partial so an interrupted run resumes where it stopped.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string results_header(int max_items);
std::string format_result_row(const ResultRow& row, int max_items);
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows, int max_items);
std::vector<ResultRow> read_results_csv(std::istream& in);

/// Writes one series CSV per (m, n, delta, method) and, when timing was
/// recorded, one timing CSV per (n, delta, method, sweep value). Returns
/// the paths written.
std::vector<std::filesystem::path> emit_plot_series(const std::vector<ResultRow>& rows,
                                                    const std::filesystem::path& out_dir);

}  // namespace pricebounds
