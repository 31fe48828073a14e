// pricebounds: run the synthetic price-bounds experiments, replay single
// result rows and turn result files into plot series.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pricebounds/csv.hpp"
#include "pricebounds/experiment.hpp"
#include "pricebounds/synthetic_data.hpp"

namespace fs = std::filesystem;
using namespace pricebounds;

namespace {

constexpr double kReplayTolerance = 1e-12;

std::vector<ResultRow> load_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file " + path.string());
  return read_results_csv(in);
}

int run_command(const fs::path& config_path) {
  ExperimentConfig cfg = load_config(config_path);
  const ExperimentResult result = run_experiment(cfg);
  std::cout << "wrote " << result.rows.size() << " rows to " << result.results_path.string()
            << '\n';
  if (!result.flagged.empty())
    std::cout << result.flagged.size() << " flagged trial(s), see flagged.csv\n";
  return 0;
}

int replay_command(const fs::path& results_path, long row_id, fs::path config_path) {
  const auto rows = load_results(results_path);
  if (row_id < 0 || row_id >= static_cast<long>(rows.size()))
    throw std::runtime_error("row " + std::to_string(row_id) + " out of range (file has " +
                             std::to_string(rows.size()) + " rows)");
  if (config_path.empty()) config_path = results_path.parent_path() / "run_config.json";
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open run config " + config_path.string());
  const ExperimentConfig cfg = config_from_json(nlohmann::json::parse(in));

  const ResultRow& recorded = rows[static_cast<std::size_t>(row_id)];
  const ResultRow replayed = replay_row(cfg, recorded);
  const double rel_diff = std::abs(replayed.rel_revenue - recorded.rel_revenue);
  const double width_diff = std::abs(replayed.avg_width - recorded.avg_width);
  std::cout << "recorded: " << format_result_row(recorded, recorded.m) << '\n'
            << "replayed: " << format_result_row(replayed, replayed.m) << '\n'
            << "|d rel_revenue| = " << csv::format_double(rel_diff)
            << ", |d avg_width| = " << csv::format_double(width_diff) << '\n';
  const bool match = rel_diff <= kReplayTolerance && width_diff <= kReplayTolerance;
  std::cout << (match ? "MATCH" : "MISMATCH") << '\n';
  return match ? 0 : 2;
}

int plots_command(const fs::path& results_path, const fs::path& out_dir) {
  const auto written = emit_plot_series(load_results(results_path), out_dir);
  for (const auto& path : written) std::cout << path.string() << '\n';
  return 0;
}

int generate_command(const SyntheticSpec& spec, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const SyntheticTrial trial = generate_dataset(spec);
  std::ofstream data(out_dir / "dataset.csv");
  write_dataset_csv(data, trial.data);
  std::ofstream truth(out_dir / "ground_truth.csv");
  write_ground_truth_csv(truth, trial.theta_star);
  std::cout << "sigma = " << csv::format_double(trial.sigma) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Profitable price bounds for prescriptive price optimization"};
  app.footer(std::string("Environment:\n  ") + kOutputDirEnv +
             "  overrides output_dir of a run config\n  " + kWorkersEnv +
             "     overrides the worker (trial thread) count");
  app.require_subcommand(1);

  fs::path config_path;
  auto* run = app.add_subcommand("run", "Run an experiment grid from a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();

  fs::path results_path;
  long row_id = 0;
  fs::path replay_config;
  auto* replay = app.add_subcommand("replay", "Re-execute one results row from its seed");
  replay->add_option("--results", results_path, "results.csv of a finished run")->required();
  replay->add_option("--row", row_id, "0-based data row index")->required();
  replay->add_option("--config", replay_config,
                     "Run config (default: run_config.json next to the results)");

  fs::path plots_out;
  auto* plots = app.add_subcommand("plots", "Aggregate results into plot-data CSVs");
  plots->add_option("--results", results_path, "results.csv of a finished run")->required();
  plots->add_option("--out", plots_out, "Directory for series files")->required();

  SyntheticSpec spec;
  fs::path generate_out;
  auto* generate = app.add_subcommand("generate", "Write one synthetic dataset and its ground truth");
  generate->add_option("--m", spec.m, "Number of items")->default_val(5);
  generate->add_option("--n", spec.n, "Number of instances")->default_val(1000);
  generate->add_option("--delta", spec.delta, "Noise level in [0, 1)")->default_val(0.25);
  generate->add_option("--seed", spec.seed, "Seed")->default_val(1);
  generate->add_flag("--independent-noise", spec.independent_noise,
                     "Draw noise per (instance, item) instead of per instance");
  generate->add_option("--out", generate_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(config_path);
    if (*replay) return replay_command(results_path, row_id, replay_config);
    if (*plots) return plots_command(results_path, plots_out);
    if (*generate) return generate_command(spec, generate_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
