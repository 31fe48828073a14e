#include "pricebounds/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <omp.h>

#include "pricebounds/bounds_bootstrap.hpp"
#include "pricebounds/csv.hpp"
#include "pricebounds/errors.hpp"
#include "pricebounds/evaluation.hpp"
#include "pricebounds/ols_fit.hpp"
#include "pricebounds/rng.hpp"
#include "pricebounds/synthetic_data.hpp"

namespace pricebounds {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kOptimumStream = 2;
constexpr std::uint64_t kBootstrapStream = 3;
constexpr std::uint64_t kCvStream = 4;
constexpr std::uint64_t kFinalSolveStream = 5;

constexpr const char* kResultsFile = "results.csv";
constexpr const char* kScatterFile = "scatter.csv";
constexpr const char* kFlaggedFile = "flagged.csv";
constexpr const char* kConfigFile = "run_config.json";
constexpr const char* kJournalFile = "results.partial";
}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::quantile:
      return "quantile";
    case Method::bootstrap:
      return "bootstrap";
    case Method::cross_validation:
      return "cross_validation";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "quantile") return Method::quantile;
  if (name == "bootstrap") return Method::bootstrap;
  if (name == "cross_validation") return Method::cross_validation;
  throw ContractViolation("unknown method '" + name + "'");
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  require(!m_values.empty() && !n_values.empty() && !delta_values.empty(),
          "ExperimentConfig: grid must be non-empty");
  require(trials >= 1, "ExperimentConfig: trials must be >= 1");
  require(!methods.empty(), "ExperimentConfig: at least one method is required");
  require(pmin < pmax, "ExperimentConfig: pmin must be below pmax");
  require(workers >= 0, "ExperimentConfig: workers must be >= 0");
  for (int m : m_values) require(m >= 1, "ExperimentConfig: m must be positive");
  for (double delta : delta_values)
    require(delta >= 0.0 && delta < 1.0, "ExperimentConfig: delta must lie in [0, 1)");
  std::set<Method> seen;
  for (const auto& sweep : methods) {
    require(seen.insert(sweep.method).second, "ExperimentConfig: method listed twice");
    require(!sweep.values.empty(), "ExperimentConfig: empty sweep for " + to_string(sweep.method));
    for (double v : sweep.values) {
      switch (sweep.method) {
        case Method::quantile:
          QuantileConfig{v}.validate();
          break;
        case Method::bootstrap:
          if (sweep.param == "confidence") {
            kappa_for_confidence(v);
          } else {
            require(sweep.param == "kappa", "ExperimentConfig: bootstrap sweeps kappa or confidence");
            require(v >= 0.0, "ExperimentConfig: kappa must be >= 0");
          }
          break;
        case Method::cross_validation:
          require(v >= 0.0 && std::isfinite(v), "ExperimentConfig: gamma must be finite and >= 0");
          break;
      }
    }
    if (sweep.method == Method::bootstrap) BootstrapConfig{n_bootstrap, 0.0}.validate();
    if (sweep.method == Method::cross_validation) {
      cv.validate();
      for (int n : n_values)
        require(n >= cv.k_folds, "ExperimentConfig: every n must be at least k_folds");
    }
  }
  for (int n : n_values) require(n >= 2, "ExperimentConfig: n must be at least 2");
  qp.validate();
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("grid")) {
    const auto& grid = j.at("grid");
    if (grid.contains("m")) cfg.m_values = grid.at("m").get<std::vector<int>>();
    if (grid.contains("n")) cfg.n_values = grid.at("n").get<std::vector<int>>();
    if (grid.contains("delta")) cfg.delta_values = grid.at("delta").get<std::vector<double>>();
  }
  cfg.trials = j.value("trials", cfg.trials);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.workers = j.value("parallelism", cfg.workers);
  cfg.independent_noise = j.value("independent_noise", cfg.independent_noise);
  cfg.record_timing = j.value("record_timing", cfg.record_timing);
  if (j.contains("envelope")) {
    cfg.pmin = j.at("envelope").value("pmin", cfg.pmin);
    cfg.pmax = j.at("envelope").value("pmax", cfg.pmax);
  }
  if (j.contains("prices")) {
    cfg.price_mean = j.at("prices").value("mean", cfg.price_mean);
    cfg.price_sd = j.at("prices").value("sd", cfg.price_sd);
  }
  if (j.contains("qp")) {
    const auto& qp = j.at("qp");
    cfg.qp.restarts = qp.value("restarts", cfg.qp.restarts);
    cfg.qp.max_iters = qp.value("max_iters", cfg.qp.max_iters);
    cfg.qp.step_tol = qp.value("step_tol", cfg.qp.step_tol);
    cfg.qp.value_tol = qp.value("value_tol", cfg.qp.value_tol);
  }

  const json methods = j.value("methods", json::object());
  for (const auto& [key, body] : methods.items()) method_from_string(key);
  if (methods.contains("quantile")) {
    cfg.methods.push_back(
        {Method::quantile, "q", methods.at("quantile").at("q").get<std::vector<double>>()});
  }
  if (methods.contains("bootstrap")) {
    const auto& b = methods.at("bootstrap");
    cfg.n_bootstrap = b.value("n_bootstrap", cfg.n_bootstrap);
    require(b.contains("kappa") != b.contains("confidence"),
            "config: bootstrap needs exactly one of 'kappa' or 'confidence'");
    const std::string param = b.contains("kappa") ? "kappa" : "confidence";
    cfg.methods.push_back({Method::bootstrap, param, b.at(param).get<std::vector<double>>()});
  }
  if (methods.contains("cross_validation")) {
    const auto& c = methods.at("cross_validation");
    cfg.cv.k_folds = c.value("k_folds", cfg.cv.k_folds);
    cfg.cv.lambda1 = c.value("lambda1", cfg.cv.lambda1);
    cfg.cv.lambda2 = c.value("lambda2", cfg.cv.lambda2);
    if (c.contains("nm")) {
      const auto& nm = c.at("nm");
      cfg.cv.nm.max_evals = nm.value("max_evals", cfg.cv.nm.max_evals);
      cfg.cv.nm.x_tol = nm.value("x_tol", cfg.cv.nm.x_tol);
      cfg.cv.nm.f_tol = nm.value("f_tol", cfg.cv.nm.f_tol);
      cfg.cv.nm.init_step = nm.value("init_step", cfg.cv.nm.init_step);
      cfg.cv.nm.reflection = nm.value("reflection", cfg.cv.nm.reflection);
      cfg.cv.nm.expansion = nm.value("expansion", cfg.cv.nm.expansion);
      cfg.cv.nm.contraction = nm.value("contraction", cfg.cv.nm.contraction);
      cfg.cv.nm.shrink = nm.value("shrink", cfg.cv.nm.shrink);
    }
    cfg.methods.push_back(
        {Method::cross_validation, "gamma", c.at("gamma").get<std::vector<double>>()});
  }
  cfg.cv.qp = cfg.qp;
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json methods = json::object();
  for (const auto& sweep : cfg.methods) {
    switch (sweep.method) {
      case Method::quantile:
        methods["quantile"] = {{"q", sweep.values}};
        break;
      case Method::bootstrap:
        methods["bootstrap"] = {{sweep.param, sweep.values}, {"n_bootstrap", cfg.n_bootstrap}};
        break;
      case Method::cross_validation:
        methods["cross_validation"] = {
            {"gamma", sweep.values},
            {"k_folds", cfg.cv.k_folds},
            {"lambda1", cfg.cv.lambda1},
            {"lambda2", cfg.cv.lambda2},
            {"nm",
             {{"max_evals", cfg.cv.nm.max_evals},
              {"x_tol", cfg.cv.nm.x_tol},
              {"f_tol", cfg.cv.nm.f_tol},
              {"init_step", cfg.cv.nm.init_step},
              {"reflection", cfg.cv.nm.reflection},
              {"expansion", cfg.cv.nm.expansion},
              {"contraction", cfg.cv.nm.contraction},
              {"shrink", cfg.cv.nm.shrink}}}};
        break;
    }
  }
  // Worker count and output location do not affect results and are left out.
  return {{"grid", {{"m", cfg.m_values}, {"n", cfg.n_values}, {"delta", cfg.delta_values}}},
          {"methods", methods},
          {"trials", cfg.trials},
          {"master_seed", cfg.master_seed},
          {"envelope", {{"pmin", cfg.pmin}, {"pmax", cfg.pmax}}},
          {"prices", {{"mean", cfg.price_mean}, {"sd", cfg.price_sd}}},
          {"independent_noise", cfg.independent_noise},
          {"record_timing", cfg.record_timing},
          {"qp",
           {{"restarts", cfg.qp.restarts},
            {"max_iters", cfg.qp.max_iters},
            {"step_tol", cfg.qp.step_tol},
            {"value_tol", cfg.qp.value_tol}}}};
}

void apply_environment_overrides(ExperimentConfig& cfg) {
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0')
    cfg.output_dir = dir;
  if (const char* workers = std::getenv(kWorkersEnv); workers != nullptr && *workers != '\0')
    cfg.workers = static_cast<int>(csv::parse_int(workers));
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  ExperimentConfig cfg = config_from_json(json::parse(in));
  apply_environment_overrides(cfg);
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Trials

std::uint64_t trial_seed(std::uint64_t master, int m, int n, double delta, int trial) {
  std::uint64_t s = derive_seed(master, static_cast<std::uint64_t>(m));
  s = derive_seed(s, static_cast<std::uint64_t>(n));
  s = derive_seed(s, std::bit_cast<std::uint64_t>(delta));
  return derive_seed(s, static_cast<std::uint64_t>(trial));
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct TrialContext {
  const ExperimentConfig& cfg;
  int m, n;
  double delta;
  int trial;
  std::uint64_t seed;
  SyntheticTrial generated;
  PriceEnvelope envelope;
  PriceVector p_star;
  CoeffMatrix theta_hat;
  RevenueQp fitted;
  std::vector<double> r2;

  TrialContext(const ExperimentConfig& c, int m_, int n_, double delta_, int trial_,
               std::uint64_t seed_)
      : cfg(c),
        m(m_),
        n(n_),
        delta(delta_),
        trial(trial_),
        seed(seed_),
        generated(generate_dataset(SyntheticSpec{m_, n_, delta_, c.price_mean, c.price_sd,
                                                 c.independent_noise,
                                                 derive_seed(seed_, kDataStream)})),
        envelope(PriceEnvelope::uniform(m_, c.pmin, c.pmax)),
        p_star(oracle_optimal_prices(generated.theta_star, envelope, c.qp,
                                     derive_seed(seed_, kOptimumStream))),
        theta_hat(fit_ols(generated.data)),
        fitted(theta_hat),
        r2(per_item_r2(theta_hat, generated.data)) {
    // Surfaces a non-positive optimum as FlaggedTrial before any method runs.
    relative_revenue(generated.theta_star, p_star, p_star);
  }

  ResultRow finish(Method method, const std::string& param, double value, const PriceBox& box,
                   Clock::time_point started, double extra_seconds) const {
    const PriceVector p_hat = maximize_revenue_boxed(fitted, box.alpha(), box.beta(), cfg.qp,
                                                     derive_seed(seed, kFinalSolveStream));
    const double elapsed = seconds_since(started) + extra_seconds;
    ResultRow row;
    row.m = m;
    row.n = n;
    row.delta = delta;
    row.method = method;
    row.sweep_param = param;
    row.sweep_value = value;
    row.trial = trial;
    row.seed = seed;
    row.rel_revenue = relative_revenue(generated.theta_star, p_hat, p_star);
    row.avg_width = average_width(box);
    if (cfg.record_timing) row.time_bounds_s = elapsed;
    row.r2 = r2;
    const Eigen::VectorXd widths = box.widths();
    row.item_widths.assign(widths.data(), widths.data() + widths.size());
    return row;
  }
};

void run_sweep(const TrialContext& ctx, const MethodSweep& sweep, std::span<const double> values,
               std::vector<ResultRow>& out) {
  const auto& data = ctx.generated.data;
  switch (sweep.method) {
    case Method::quantile:
      for (double q : values) {
        const auto started = Clock::now();
        const PriceBox box = quantile_bounds(data, ctx.envelope, QuantileConfig{q});
        out.push_back(ctx.finish(sweep.method, sweep.param, q, box, started, 0.0));
      }
      break;
    case Method::bootstrap: {
      const auto started = Clock::now();
      const BootstrapReplicates replicates =
          bootstrap_replicates(data, ctx.envelope, ctx.cfg.n_bootstrap, ctx.cfg.qp,
                               derive_seed(ctx.seed, kBootstrapStream));
      const double shared = seconds_since(started);
      for (double v : values) {
        const auto t = Clock::now();
        const double kappa = sweep.param == "confidence" ? kappa_for_confidence(v) : v;
        const PriceBox box = bounds_from_replicates(replicates, ctx.envelope, kappa);
        out.push_back(ctx.finish(sweep.method, sweep.param, v, box, t, shared));
      }
      break;
    }
    case Method::cross_validation:
      for (double gamma : values) {
        const auto started = Clock::now();
        CvConfig cv = ctx.cfg.cv;
        cv.gamma = gamma;
        cv.qp = ctx.cfg.qp;
        const PriceBox box =
            cv_bounds_search(data, ctx.envelope, cv, derive_seed(ctx.seed, kCvStream));
        out.push_back(ctx.finish(sweep.method, sweep.param, gamma, box, started, 0.0));
      }
      break;
  }
}

}  // namespace

TrialOutcome run_trial(const ExperimentConfig& cfg, int m, int n, double delta, int trial,
                       std::uint64_t seed) {
  TrialOutcome outcome;
  try {
    const TrialContext ctx(cfg, m, n, delta, trial, seed);
    for (const auto& sweep : cfg.methods) run_sweep(ctx, sweep, sweep.values, outcome.rows);
  } catch (const std::exception& e) {
    outcome.rows.clear();
    outcome.flagged = FlaggedRow{m, n, delta, trial, seed, e.what()};
  }
  return outcome;
}

ResultRow replay_row(const ExperimentConfig& cfg, const ResultRow& recorded) {
  const auto sweep = std::find_if(cfg.methods.begin(), cfg.methods.end(),
                                  [&](const MethodSweep& s) { return s.method == recorded.method; });
  require(sweep != cfg.methods.end(),
          "replay: method " + to_string(recorded.method) + " is not in the run config");
  MethodSweep single = *sweep;
  single.param = recorded.sweep_param;
  const TrialContext ctx(cfg, recorded.m, recorded.n, recorded.delta, recorded.trial,
                         recorded.seed);
  std::vector<ResultRow> rows;
  const double value = recorded.sweep_value;
  run_sweep(ctx, single, std::span<const double>(&value, 1), rows);
  return rows.front();
}

// ---------------------------------------------------------------------------
// Serialization

std::string results_header(int max_items) {
  std::string header =
      "m,n,delta,method,sweep_param,sweep_value,trial,seed,rel_revenue,avg_width,time_bounds_s";
  for (int j = 0; j < max_items; ++j) header += ",r2_item_" + std::to_string(j);
  return header;
}

std::string format_result_row(const ResultRow& row, int max_items) {
  std::string line = std::to_string(row.m) + ',' + std::to_string(row.n) + ',' +
                     csv::format_double(row.delta) + ',' + to_string(row.method) + ',' +
                     row.sweep_param + ',' + csv::format_double(row.sweep_value) + ',' +
                     std::to_string(row.trial) + ',' + std::to_string(row.seed) + ',' +
                     csv::format_double(row.rel_revenue) + ',' +
                     csv::format_double(row.avg_width) + ',';
  if (row.time_bounds_s) line += csv::format_double(*row.time_bounds_s);
  for (int j = 0; j < max_items; ++j) {
    line += ',';
    if (j < static_cast<int>(row.r2.size()))
      line += csv::format_double(row.r2[static_cast<std::size_t>(j)]);
  }
  return line;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows, int max_items) {
  out << results_header(max_items) << '\n';
  for (const auto& row : rows) out << format_result_row(row, max_items) << '\n';
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "results: missing header");
  const auto header = csv::split(line);
  require(header.size() >= 11 && header[0] == "m" && header[10] == "time_bounds_s",
          "results: unexpected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    require(f.size() == header.size(), "results: ragged row '" + line + "'");
    ResultRow row;
    row.m = static_cast<int>(csv::parse_int(f[0]));
    row.n = static_cast<int>(csv::parse_int(f[1]));
    row.delta = csv::parse_double(f[2]);
    row.method = method_from_string(f[3]);
    row.sweep_param = f[4];
    row.sweep_value = csv::parse_double(f[5]);
    row.trial = static_cast<int>(csv::parse_int(f[6]));
    row.seed = csv::parse_uint(f[7]);
    row.rel_revenue = csv::parse_double(f[8]);
    row.avg_width = csv::parse_double(f[9]);
    if (!f[10].empty()) row.time_bounds_s = csv::parse_double(f[10]);
    for (int j = 0; j < row.m && 11 + j < static_cast<int>(f.size()); ++j)
      row.r2.push_back(csv::parse_double(f[static_cast<std::size_t>(11 + j)]));
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

json doubles_to_json(const std::vector<double>& values) {
  json out = json::array();
  for (double v : values) out.push_back(csv::format_double(v));
  return out;
}

std::vector<double> doubles_from_json(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) out.push_back(csv::parse_double(v.get<std::string>()));
  return out;
}

json outcome_to_json(std::size_t task, const TrialOutcome& outcome) {
  json rows = json::array();
  for (const auto& r : outcome.rows) {
    rows.push_back({{"m", r.m},
                    {"n", r.n},
                    {"delta", csv::format_double(r.delta)},
                    {"method", to_string(r.method)},
                    {"param", r.sweep_param},
                    {"value", csv::format_double(r.sweep_value)},
                    {"trial", r.trial},
                    {"seed", r.seed},
                    {"rel", csv::format_double(r.rel_revenue)},
                    {"width", csv::format_double(r.avg_width)},
                    {"time", r.time_bounds_s ? csv::format_double(*r.time_bounds_s) : ""},
                    {"r2", doubles_to_json(r.r2)},
                    {"widths", doubles_to_json(r.item_widths)}});
  }
  json j = {{"task", task}, {"rows", rows}};
  if (outcome.flagged) {
    const auto& f = *outcome.flagged;
    j["flagged"] = {{"m", f.m},
                    {"n", f.n},
                    {"delta", csv::format_double(f.delta)},
                    {"trial", f.trial},
                    {"seed", f.seed},
                    {"reason", f.reason}};
  }
  return j;
}

std::pair<std::size_t, TrialOutcome> outcome_from_json(const json& j) {
  TrialOutcome outcome;
  for (const auto& r : j.at("rows")) {
    ResultRow row;
    row.m = r.at("m");
    row.n = r.at("n");
    row.delta = csv::parse_double(r.at("delta"));
    row.method = method_from_string(r.at("method"));
    row.sweep_param = r.at("param");
    row.sweep_value = csv::parse_double(r.at("value"));
    row.trial = r.at("trial");
    row.seed = r.at("seed");
    row.rel_revenue = csv::parse_double(r.at("rel"));
    row.avg_width = csv::parse_double(r.at("width"));
    if (const std::string t = r.at("time"); !t.empty()) row.time_bounds_s = csv::parse_double(t);
    row.r2 = doubles_from_json(r.at("r2"));
    row.item_widths = doubles_from_json(r.at("widths"));
    outcome.rows.push_back(std::move(row));
  }
  if (j.contains("flagged")) {
    const auto& f = j.at("flagged");
    outcome.flagged = FlaggedRow{f.at("m"), f.at("n"), csv::parse_double(f.at("delta")),
                                 f.at("trial"), f.at("seed"), f.at("reason")};
  }
  return {j.at("task").get<std::size_t>(), std::move(outcome)};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Task {
  int m, n;
  double delta;
  int trial;
};

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  const std::string config_text = config_to_json(cfg).dump(2) + "\n";
  const fs::path config_path = dir / kConfigFile;
  const fs::path journal_path = dir / kJournalFile;

  std::vector<Task> tasks;
  for (int m : cfg.m_values)
    for (int n : cfg.n_values)
      for (double delta : cfg.delta_values)
        for (int t = 0; t < cfg.trials; ++t) tasks.push_back({m, n, delta, t});

  std::map<std::size_t, TrialOutcome> done;
  const bool resume = fs::exists(journal_path) && fs::exists(config_path) &&
                      read_file(config_path) == config_text;
  if (resume) {
    std::ifstream journal(journal_path);
    std::string line;
    while (std::getline(journal, line)) {
      try {
        auto [task, outcome] = outcome_from_json(json::parse(line));
        if (task < tasks.size()) done[task] = std::move(outcome);
      } catch (const std::exception&) {
        // A line cut short by an interruption; that trial is rerun.
      }
    }
  } else {
    std::ofstream config_out(config_path, std::ios::binary | std::ios::trunc);
    config_out << config_text;
    if (!config_out) throw std::runtime_error("cannot write to output directory " + dir.string());
    std::ofstream(journal_path, std::ios::trunc);
  }

  std::ofstream journal(journal_path, std::ios::app);
  if (!journal) throw std::runtime_error("cannot write to output directory " + dir.string());

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (!done.count(i)) pending.push_back(i);

  const int workers = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
  const auto pending_count = static_cast<long>(pending.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long p = 0; p < pending_count; ++p) {
    const std::size_t index = pending[static_cast<std::size_t>(p)];
    const Task& task = tasks[index];
    TrialOutcome outcome =
        run_trial(cfg, task.m, task.n, task.delta, task.trial,
                  trial_seed(cfg.master_seed, task.m, task.n, task.delta, task.trial));
    const std::string line = outcome_to_json(index, outcome).dump();
#pragma omp critical(pricebounds_journal)
    {
      journal << line << '\n' << std::flush;
      done[index] = std::move(outcome);
    }
  }
  journal.close();

  ExperimentResult result;
  result.max_items = *std::max_element(cfg.m_values.begin(), cfg.m_values.end());
  for (auto& [index, outcome] : done) {
    for (auto& row : outcome.rows) result.rows.push_back(std::move(row));
    if (outcome.flagged) result.flagged.push_back(*outcome.flagged);
  }

  result.results_path = dir / kResultsFile;
  {
    std::ofstream out(result.results_path, std::ios::binary | std::ios::trunc);
    write_results_csv(out, result.rows, result.max_items);
    if (!out) throw std::runtime_error("failed writing " + result.results_path.string());
  }
  {
    std::ofstream out(dir / kScatterFile, std::ios::binary | std::ios::trunc);
    out << "m,n,delta,method,sweep_param,sweep_value,trial,item,r2,width\n";
    for (const auto& row : result.rows)
      for (std::size_t j = 0; j < row.r2.size() && j < row.item_widths.size(); ++j) {
        if (std::isnan(row.r2[j])) continue;
        out << row.m << ',' << row.n << ',' << csv::format_double(row.delta) << ','
            << to_string(row.method) << ',' << row.sweep_param << ','
            << csv::format_double(row.sweep_value) << ',' << row.trial << ',' << j << ','
            << csv::format_double(row.r2[j]) << ',' << csv::format_double(row.item_widths[j])
            << '\n';
      }
  }
  {
    std::ofstream out(dir / kFlaggedFile, std::ios::binary | std::ios::trunc);
    out << "m,n,delta,trial,seed,reason\n";
    for (const auto& f : result.flagged)
      out << f.m << ',' << f.n << ',' << csv::format_double(f.delta) << ',' << f.trial << ','
          << f.seed << ',' << sanitize(f.reason) << '\n';
  }
  fs::remove(journal_path, ec);
  return result;
}

// ---------------------------------------------------------------------------
// Plot series

namespace {

std::string compact(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", value);
  return buffer;
}

template <typename Key>
std::vector<Key> first_seen_order(const std::vector<Key>& keys) {
  std::vector<Key> order;
  std::set<Key> seen;
  for (const auto& k : keys)
    if (seen.insert(k).second) order.push_back(k);
  return order;
}

}  // namespace

std::vector<fs::path> emit_plot_series(const std::vector<ResultRow>& rows,
                                       const fs::path& out_dir) {
  require(!rows.empty(), "emit_plot_series: no result rows");
  fs::create_directories(out_dir);
  std::vector<fs::path> written;

  using GroupKey = std::tuple<int, int, double, Method>;
  std::vector<GroupKey> keys;
  for (const auto& r : rows) keys.emplace_back(r.m, r.n, r.delta, r.method);
  for (const auto& key : first_seen_order(keys)) {
    const auto& [m, n, delta, method] = key;
    std::vector<double> values;
    std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_value;
    std::string param;
    for (const auto& r : rows) {
      if (GroupKey{r.m, r.n, r.delta, r.method} != key) continue;
      values.push_back(r.sweep_value);
      by_value[r.sweep_value].first.push_back(r.avg_width);
      by_value[r.sweep_value].second.push_back(r.rel_revenue);
      param = r.sweep_param;
    }
    const fs::path path = out_dir / ("series_m" + std::to_string(m) + "_n" + std::to_string(n) +
                                     "_delta" + compact(delta) + "_" + to_string(method) + ".csv");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "sweep_value,mean_avg_width,sem_avg_width,mean_rel_revenue,sem_rel_revenue,n_trials\n";
    for (double v : first_seen_order(values)) {
      const MeanSem width = mean_and_sem(by_value[v].first);
      const MeanSem revenue = mean_and_sem(by_value[v].second);
      out << csv::format_double(v) << ',' << csv::format_double(width.mean) << ','
          << csv::format_double(width.sem) << ',' << csv::format_double(revenue.mean) << ','
          << csv::format_double(revenue.sem) << ',' << width.count << '\n';
    }
    written.push_back(path);
  }

  using TimingKey = std::tuple<int, double, Method, std::string, double>;
  std::vector<TimingKey> timing_keys;
  for (const auto& r : rows)
    if (r.time_bounds_s)
      timing_keys.emplace_back(r.n, r.delta, r.method, r.sweep_param, r.sweep_value);
  for (const auto& key : first_seen_order(timing_keys)) {
    const auto& [n, delta, method, param, value] = key;
    std::map<int, std::vector<double>> by_m;
    for (const auto& r : rows)
      if (r.time_bounds_s && TimingKey{r.n, r.delta, r.method, r.sweep_param, r.sweep_value} == key)
        by_m[r.m].push_back(*r.time_bounds_s);
    const fs::path path = out_dir / ("timing_n" + std::to_string(n) + "_delta" + compact(delta) +
                                     "_" + to_string(method) + "_" + param + compact(value) +
                                     ".csv");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "m,mean_time_s,sem_time_s\n";
    for (const auto& [m, times] : by_m) {
      const MeanSem t = mean_and_sem(times);
      out << m << ',' << csv::format_double(t.mean) << ',' << csv::format_double(t.sem) << '\n';
    }
    written.push_back(path);
  }
  return written;
}

}  // namespace pricebounds
