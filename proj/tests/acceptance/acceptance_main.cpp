// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pricebounds/bounds_bootstrap.hpp"
#include "pricebounds/bounds_cv.hpp"
#include "pricebounds/evaluation.hpp"
#include "pricebounds/experiment.hpp"
#include "pricebounds/ols_fit.hpp"
#include "pricebounds/price_optimizer.hpp"
#include "pricebounds/rng.hpp"
#include "pricebounds/synthetic_data.hpp"

using namespace pricebounds;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pricebounds_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

std::vector<double> steps(double from, double to, double step) {
  std::vector<double> out;
  for (int k = 0; from + k * step <= to + 1e-9; ++k) out.push_back(std::round((from + k * step) * 1e6) / 1e6);
  return out;
}

std::vector<double> confidence_levels() {
  return {0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 0.99, 1.0};
}

// Mean and SEM of one metric over the rows of a (method, sweep value) pair.
MeanSem summarize(const std::vector<ResultRow>& rows, Method method, double value,
                  double ResultRow::*metric) {
  std::vector<double> values;
  for (const auto& r : rows)
    if (r.method == method && r.sweep_value == value) values.push_back(r.*metric);
  return mean_and_sem(values);
}

// --- 1 ----------------------------------------------------------------------

Outcome optimality_bound() {
  ExperimentConfig cfg;
  cfg.m_values = {2, 5};
  cfg.n_values = {300, 1000};
  cfg.delta_values = {0.25, 0.5, 0.75};
  cfg.trials = 20;
  cfg.master_seed = 101;
  cfg.output_dir = scratch("optimality").string();
  cfg.methods = {{Method::quantile, "q", steps(0.6, 1.0, 0.05)},
                 {Method::bootstrap, "confidence", confidence_levels()},
                 {Method::cross_validation, "gamma", steps(0.25, 3.0, 0.25)}};
  const ExperimentResult result = run_experiment(cfg);
  double worst = -std::numeric_limits<double>::infinity();
  int violations = 0;
  for (const auto& row : result.rows) {
    worst = std::max(worst, row.rel_revenue);
    if (!(row.rel_revenue <= 1.0 + 1e-9)) ++violations;
  }
  fs::remove_all(cfg.output_dir);
  return {violations == 0 && !result.rows.empty(),
          fmt("%zu rows, %zu flagged trials, max rel_revenue %.12f, %d above 1+1e-9",
              result.rows.size(), result.flagged.size(), worst, violations)};
}

// --- 2 ----------------------------------------------------------------------

Outcome oracle_equivalence() {
  SyntheticSpec spec;
  const QpSolverConfig qp;
  CounterRng rng(202);
  double worst_gap = -std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int t = 0; t < 50; ++t) {
    spec.m = 1 + t % 3;
    spec.seed = rng.next_u64();
    const CoeffMatrix theta = sample_ground_truth(spec);
    const PriceVector lo = PriceVector::Constant(spec.m, 0.5);
    const PriceVector hi = PriceVector::Constant(spec.m, 1.1);
    const double grid = eval_revenue(theta, grid_oracle(theta, lo, hi, 1e-3));
    const double solved = eval_revenue(theta, maximize_revenue_boxed(theta, lo, hi, qp, rng.next_u64()));
    worst_gap = std::max(worst_gap, grid - solved);
    if (!(solved >= grid - 1e-3)) ++failures;
  }
  return {failures == 0, fmt("50 instances, max (grid - qp) revenue %.3e, %d below tolerance",
                             worst_gap, failures)};
}

// --- 3 ----------------------------------------------------------------------

Outcome noise_free_degeneracy() {
  double ols_err = 0.0, boot_sd = 0.0, cv_err = 0.0;
  const QpSolverConfig qp;
  for (int m : {1, 2, 5}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      SyntheticSpec spec;
      spec.m = m;
      spec.n = 200;
      spec.delta = 0.0;
      spec.seed = 300 + seed * 10 + static_cast<std::uint64_t>(m);
      const SyntheticTrial trial = generate_dataset(spec);
      const PriceEnvelope env = PriceEnvelope::uniform(m, 0.5, 1.1);
      ols_err = std::max(ols_err, (fit_ols(trial.data).entries() - trial.theta_star.entries())
                                      .cwiseAbs()
                                      .maxCoeff());
      const BootstrapReplicates reps = bootstrap_replicates(trial.data, env, 100, qp, seed);
      boot_sd = std::max(boot_sd, reps.sd.maxCoeff());
      const PriceBox full = PriceBox::full(env);
      const CvConfig cv;
      const PriceVector p_hat = maximize_revenue_boxed(trial.theta_star, full, qp, seed);
      cv_err = std::max(cv_err, std::abs(cv_revenue_estimate(trial.data, full, cv, seed) -
                                         eval_revenue(trial.theta_star, p_hat)));
    }
  }
  return {ols_err <= 1e-8 && boot_sd <= 1e-8 && cv_err <= 1e-8,
          fmt("max OLS error %.2e, max bootstrap sd %.2e, max CV gap %.2e", ols_err, boot_sd,
              cv_err)};
}

// --- 4 ----------------------------------------------------------------------

Outcome noise_calibration() {
  double worst = 0.0;
  int checked = 0;
  const std::pair<int, int> shapes[] = {{5, 1000}, {10, 500}, {2, 2500}, {1, 5000}};
  for (double delta : {0.25, 0.5, 0.75}) {
    for (const auto& [m, n] : shapes) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SyntheticSpec spec;
        spec.m = m;
        spec.n = n;
        spec.delta = delta;
        spec.seed = 400 + seed;
        const SyntheticTrial trial = generate_dataset(spec);
        const double realized = realized_noise_level(trial.data, trial.sigma);
        worst = std::max(worst, std::abs(realized - delta) / delta);
        ++checked;
      }
    }
  }
  return {worst <= 0.05, fmt("%d datasets, max relative error %.4f", checked, worst)};
}

// --- 5 and 6 share one reduced-scale run per noise level --------------------

constexpr double kCriterionKappa = 1.645;
constexpr double kCriterionGamma = 1.25;

ExperimentResult reduced_scale_run(double delta, const std::string& tag) {
  ExperimentConfig cfg;
  cfg.m_values = {5};
  cfg.n_values = {1000};
  cfg.delta_values = {delta};
  cfg.trials = 30;
  cfg.master_seed = 11;
  cfg.output_dir = scratch(tag).string();
  cfg.methods = {{Method::quantile, "q", steps(0.05, 1.0, 0.05)},
                 {Method::bootstrap, "kappa", {kCriterionKappa}},
                 {Method::cross_validation, "gamma", {kCriterionGamma}}};
  ExperimentResult result = run_experiment(cfg);
  fs::remove_all(cfg.output_dir);
  return result;
}

Outcome beats_quantile(const ExperimentResult& run) {
  std::vector<double> qs;
  for (const auto& r : run.rows)
    if (r.method == Method::quantile && std::find(qs.begin(), qs.end(), r.sweep_value) == qs.end())
      qs.push_back(r.sweep_value);

  bool pass = true;
  std::string detail;
  const std::pair<Method, double> contenders[] = {{Method::bootstrap, kCriterionKappa},
                                                  {Method::cross_validation, kCriterionGamma}};
  for (const auto& [method, value] : contenders) {
    const MeanSem width = summarize(run.rows, method, value, &ResultRow::avg_width);
    const MeanSem revenue = summarize(run.rows, method, value, &ResultRow::rel_revenue);
    double best_q = qs.front();
    for (double q : qs)
      if (std::abs(summarize(run.rows, Method::quantile, q, &ResultRow::avg_width).mean - width.mean) <
          std::abs(summarize(run.rows, Method::quantile, best_q, &ResultRow::avg_width).mean - width.mean))
        best_q = q;
    const MeanSem q_width = summarize(run.rows, Method::quantile, best_q, &ResultRow::avg_width);
    const MeanSem q_revenue = summarize(run.rows, Method::quantile, best_q, &ResultRow::rel_revenue);
    const double pooled = std::sqrt(revenue.sem * revenue.sem + q_revenue.sem * q_revenue.sem);
    const double margin = (revenue.mean - q_revenue.mean) / pooled;
    pass = pass && revenue.count > 0 && margin > 2.0;
    detail += fmt("%s%s %.4f@w%.3f vs q=%.2f %.4f@w%.3f (%.1f pooled SE)", detail.empty() ? "" : "; ",
                  to_string(method).c_str(), revenue.mean, width.mean, best_q, q_revenue.mean,
                  q_width.mean, margin);
  }
  return {pass, detail};
}

double item_spearman(const std::vector<ResultRow>& rows, Method method, double value) {
  std::vector<double> r2, widths;
  for (const auto& r : rows) {
    if (r.method != method || r.sweep_value != value) continue;
    for (std::size_t j = 0; j < r.r2.size(); ++j) {
      r2.push_back(r.r2[j]);
      widths.push_back(r.item_widths[j]);
    }
  }
  return spearman_correlation(r2, widths);
}

Outcome r2_width_correlation(const ExperimentResult& high_noise,
                      const std::vector<const ExperimentResult*>& all_levels) {
  const double cv = item_spearman(high_noise.rows, Method::cross_validation, kCriterionGamma);
  const double boot = item_spearman(high_noise.rows, Method::bootstrap, kCriterionKappa);
  // Pooled over noise levels, for diagnosis only.
  std::vector<ResultRow> pooled;
  for (const auto* level : all_levels) pooled.insert(pooled.end(), level->rows.begin(), level->rows.end());
  const double cv_pooled = item_spearman(pooled, Method::cross_validation, kCriterionGamma);
  const double boot_pooled = item_spearman(pooled, Method::bootstrap, kCriterionKappa);
  return {cv >= 0.2 && boot <= -0.2,
          fmt("delta=0.75: spearman(R2, width) cv %+.3f (need >= +0.2), bootstrap %+.3f "
              "(need <= -0.2); pooled over delta: cv %+.3f, bootstrap %+.3f",
              cv, boot, cv_pooled, boot_pooled)};
}

// --- 7 ----------------------------------------------------------------------

Outcome timing_growth() {
  ExperimentConfig cfg;
  cfg.m_values = {2, 10};
  cfg.n_values = {300};
  cfg.delta_values = {0.5};
  cfg.trials = 10;
  cfg.master_seed = 707;
  cfg.workers = 1;
  cfg.record_timing = true;
  cfg.output_dir = scratch("timing").string();
  cfg.methods = {{Method::bootstrap, "kappa", {2.576}}, {Method::cross_validation, "gamma", {3.0}}};
  const ExperimentResult result = run_experiment(cfg);
  fs::remove_all(cfg.output_dir);
  std::map<std::pair<Method, int>, std::vector<double>> times;
  for (const auto& r : result.rows)
    if (r.time_bounds_s) times[{r.method, r.m}].push_back(*r.time_bounds_s);
  auto mean = [&](Method method, int m) { return mean_and_sem(times[{method, m}]).mean; };
  const double boot = mean(Method::bootstrap, 10) / mean(Method::bootstrap, 2);
  const double cv = mean(Method::cross_validation, 10) / mean(Method::cross_validation, 2);
  return {cv > boot, fmt("time(m=10)/time(m=2): cv %.2f (%.4fs/%.4fs), bootstrap %.2f (%.4fs/%.4fs)",
                         cv, mean(Method::cross_validation, 10), mean(Method::cross_validation, 2),
                         boot, mean(Method::bootstrap, 10), mean(Method::bootstrap, 2))};
}

// --- 8 ----------------------------------------------------------------------

Outcome feasibility() {
  CounterRng rng(808);
  int violations[3] = {0, 0, 0};
  const QpSolverConfig qp;
  for (int t = 0; t < 1000; ++t) {
    SyntheticSpec spec;
    spec.m = 1 + static_cast<int>(rng.index(4));
    spec.n = 20 + static_cast<int>(rng.index(131));
    spec.delta = rng.uniform(0.0, 0.9);
    spec.price_mean = rng.uniform(0.5, 1.1);
    spec.price_sd = rng.uniform(0.01, 0.3);
    spec.seed = rng.next_u64();
    const SyntheticTrial trial = generate_dataset(spec);
    const double lo = rng.uniform(0.3, 0.8);
    const PriceEnvelope env = PriceEnvelope::uniform(spec.m, lo, lo + rng.uniform(0.0, 0.8));

    auto feasible = [&](const PriceBox& box, double budget) {
      return (box.alpha().array() >= env.lower().array()).all() &&
             (box.beta().array() <= env.upper().array()).all() &&
             (box.alpha().array() <= box.beta().array()).all() &&
             (box.beta() - box.alpha()).sum() <= budget + 1e-6;
    };
    const double inf = std::numeric_limits<double>::infinity();

    const QuantileConfig qcfg{rng.uniform(0.01, 1.0)};
    if (!feasible(quantile_bounds(trial.data, env, qcfg), inf)) ++violations[0];

    const BootstrapConfig bcfg{2 + static_cast<int>(rng.index(19)), rng.uniform(0.0, 4.0)};
    if (!feasible(bootstrap_bounds(trial.data, env, bcfg, qp, rng.next_u64()), inf)) ++violations[1];

    CvConfig ccfg;
    ccfg.gamma = rng.uniform(0.0, 3.0);
    ccfg.k_folds = 2 + static_cast<int>(rng.index(4));
    ccfg.lambda1 = rng.uniform(0.1, 10.0);
    ccfg.lambda2 = rng.uniform(0.1, 10.0);
    if (!feasible(cv_bounds_search(trial.data, env, ccfg, rng.next_u64()), ccfg.gamma)) ++violations[2];
  }
  return {violations[0] + violations[1] + violations[2] == 0,
          fmt("1000 invocations each; violations quantile %d, bootstrap %d, cv %d", violations[0],
              violations[1], violations[2])};
}

// --- 9 ----------------------------------------------------------------------

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.m_values = {2, 5};
  cfg.n_values = {300};
  cfg.delta_values = {0.25, 0.75};
  cfg.trials = 6;
  cfg.master_seed = 909;
  cfg.methods = {{Method::quantile, "q", {0.6, 0.8, 1.0}},
                 {Method::bootstrap, "confidence", {0.9, 0.99}},
                 {Method::cross_validation, "gamma", {0.5, 1.5}}};
  std::vector<std::string> outputs;
  int runs = 0;
  for (int workers : {1, 1, 2, 4}) {
    cfg.workers = workers;
    cfg.output_dir = scratch("determinism_" + std::to_string(runs++)).string();
    run_experiment(cfg);
    std::string bytes;
    for (const char* file : {"results.csv", "scatter.csv", "flagged.csv"})
      bytes += slurp(fs::path(cfg.output_dir) / file) + '\x1f';
    outputs.push_back(bytes);
    fs::remove_all(cfg.output_dir);
  }
  int differing = 0;
  for (const auto& o : outputs) differing += o != outputs.front();
  return {differing == 0 && outputs.front().size() > 100,
          fmt("4 runs (workers 1, 1, 2, 4), %d differ from the first, %zu bytes each", differing,
              outputs.front().size())};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, double budget_s, const std::function<Outcome()>& run) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool within = budget_s <= 0 || seconds <= budget_s;
    const bool pass = o.pass && within;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s [%.1fs%s]\n", pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), seconds, within ? "" : ", over time budget");
    std::fflush(stdout);
  };

  report(1, "optimality bound", 600, optimality_bound);
  report(2, "oracle equivalence", 120, oracle_equivalence);
  report(3, "noise-free degeneracy", 60, noise_free_degeneracy);
  report(4, "noise calibration", 60, noise_calibration);

  ExperimentResult low, mid, high;
  report(5, "bootstrap and cv beat quantile", 1800, [&] {
    low = reduced_scale_run(0.25, "reduced_low");
    return beats_quantile(low);
  });
  report(6, "r2 vs width rank correlation", 1800, [&] {
    mid = reduced_scale_run(0.5, "reduced_mid");
    high = reduced_scale_run(0.75, "reduced_high");
    return r2_width_correlation(high, {&low, &mid, &high});
  });
  report(7, "cv time grows faster with m", 1200, timing_growth);
  report(8, "feasibility", 300, feasibility);
  report(9, "determinism", 0, determinism);

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
