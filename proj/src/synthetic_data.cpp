#include "pricebounds/synthetic_data.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <tuple>

#include "pricebounds/csv.hpp"
#include "pricebounds/errors.hpp"
#include "pricebounds/rng.hpp"

namespace pricebounds {

namespace {
constexpr std::uint64_t kThetaStream = 1;
constexpr std::uint64_t kPriceStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

Eigen::MatrixXd noise_free_demand(const CoeffMatrix& theta, const Eigen::MatrixXd& prices) {
  const int m = theta.items();
  Eigen::MatrixXd demand = prices * theta.entries().bottomRows(m);
  demand.rowwise() += theta.entries().row(0);
  return demand;
}
}  // namespace

void SyntheticSpec::validate() const {
  require(m >= 1 && n >= 1, "SyntheticSpec: m and n must be positive");
  require(delta >= 0.0 && delta < 1.0, "SyntheticSpec: delta must lie in [0, 1)");
  require(std::isfinite(price_mean) && price_sd >= 0.0 && std::isfinite(price_sd),
          "SyntheticSpec: invalid price distribution");
}

CoeffMatrix sample_ground_truth(const SyntheticSpec& spec) {
  spec.validate();
  const int m = spec.m;
  const double mm = static_cast<double>(m);
  CounterRng rng(derive_seed(spec.seed, kThetaStream));
  Eigen::MatrixXd entries(m + 1, m);
  for (int j = 0; j < m; ++j) {
    entries(0, j) = rng.uniform(mm, 3.0 * mm);
    for (int l = 0; l < m; ++l)
      entries(1 + l, j) = l == j ? rng.uniform(-3.0 * mm, -2.0 * mm) : rng.uniform(0.0, 3.0);
  }
  return CoeffMatrix(std::move(entries));
}

double calibrate_noise_sigma(const CoeffMatrix& theta_star, const Eigen::MatrixXd& prices,
                             double delta) {
  require(delta >= 0.0 && delta < 1.0, "calibrate_noise_sigma: delta must lie in [0, 1)");
  require(prices.cols() == theta_star.items() && prices.rows() >= 1,
          "calibrate_noise_sigma: price matrix shape mismatch");
  const double mean_square = noise_free_demand(theta_star, prices).squaredNorm() /
                             static_cast<double>(prices.size());
  return delta * std::sqrt(mean_square / (1.0 - delta * delta));
}

double realized_noise_level(const PriceDemandDataset& data, double sigma) {
  const double total = data.demands().squaredNorm();
  require(total > 0.0, "realized_noise_level: all demands are zero");
  return std::sqrt(static_cast<double>(data.demands().size()) * sigma * sigma / total);
}

SyntheticTrial generate_dataset(const SyntheticSpec& spec) {
  spec.validate();
  CoeffMatrix theta = sample_ground_truth(spec);

  CounterRng price_rng(derive_seed(spec.seed, kPriceStream));
  Eigen::MatrixXd prices(spec.n, spec.m);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.m; ++j) prices(i, j) = price_rng.normal(spec.price_mean, spec.price_sd);

  Eigen::MatrixXd demands = noise_free_demand(theta, prices);
  const double sigma = calibrate_noise_sigma(theta, prices, spec.delta);
  if (sigma > 0.0) {
    CounterRng noise_rng(derive_seed(spec.seed, kNoiseStream));
    for (int i = 0; i < spec.n; ++i) {
      if (spec.independent_noise) {
        for (int j = 0; j < spec.m; ++j) demands(i, j) += noise_rng.normal(0.0, sigma);
      } else {
        demands.row(i).array() += noise_rng.normal(0.0, sigma);
      }
    }
  }
  return {std::move(theta), PriceDemandDataset(std::move(prices), std::move(demands)), sigma};
}

PriceVector oracle_optimal_prices(const CoeffMatrix& theta_star, const PriceEnvelope& envelope,
                                  const QpSolverConfig& qp, std::uint64_t seed) {
  return maximize_revenue_boxed(theta_star, envelope.lower(), envelope.upper(), qp, seed);
}

void write_dataset_csv(std::ostream& out, const PriceDemandDataset& data, int trial) {
  out << "trial,i,item,price,demand\n";
  for (int i = 0; i < data.size(); ++i)
    for (int j = 0; j < data.items(); ++j)
      out << trial << ',' << i << ',' << j << ',' << csv::format_double(data.prices()(i, j)) << ','
          << csv::format_double(data.demands()(i, j)) << '\n';
}

PriceDemandDataset read_dataset_csv(std::istream& in, int trial) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "read_dataset_csv: missing header");
  require(csv::split(line) == std::vector<std::string>{"trial", "i", "item", "price", "demand"},
          "read_dataset_csv: unexpected header '" + line + "'");
  std::map<std::pair<int, int>, std::pair<double, double>> cells;
  int n = 0, m = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    require(fields.size() == 5, "read_dataset_csv: expected 5 fields in '" + line + "'");
    if (csv::parse_int(fields[0]) != trial) continue;
    const auto i = static_cast<int>(csv::parse_int(fields[1]));
    const auto j = static_cast<int>(csv::parse_int(fields[2]));
    require(i >= 0 && j >= 0, "read_dataset_csv: negative index");
    cells[{i, j}] = {csv::parse_double(fields[3]), csv::parse_double(fields[4])};
    n = std::max(n, i + 1);
    m = std::max(m, j + 1);
  }
  require(n > 0, "read_dataset_csv: no rows for trial " + std::to_string(trial));
  require(cells.size() == static_cast<std::size_t>(n) * static_cast<std::size_t>(m),
          "read_dataset_csv: incomplete instance/item grid");
  Eigen::MatrixXd prices(n, m), demands(n, m);
  for (const auto& [key, value] : cells) {
    prices(key.first, key.second) = value.first;
    demands(key.first, key.second) = value.second;
  }
  return {std::move(prices), std::move(demands)};
}

void write_ground_truth_csv(std::ostream& out, const CoeffMatrix& theta) {
  out << "item,ell,theta\n";
  for (int j = 0; j < theta.items(); ++j)
    for (int ell = 0; ell <= theta.items(); ++ell)
      out << j << ',' << ell << ',' << csv::format_double(theta.entries()(ell, j)) << '\n';
}

CoeffMatrix read_ground_truth_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "read_ground_truth_csv: missing header");
  require(csv::split(line) == std::vector<std::string>{"item", "ell", "theta"},
          "read_ground_truth_csv: unexpected header '" + line + "'");
  std::map<std::pair<int, int>, double> cells;
  int m = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    require(fields.size() == 3, "read_ground_truth_csv: expected 3 fields in '" + line + "'");
    const auto j = static_cast<int>(csv::parse_int(fields[0]));
    const auto ell = static_cast<int>(csv::parse_int(fields[1]));
    require(j >= 0 && ell >= 0, "read_ground_truth_csv: negative index");
    cells[{j, ell}] = csv::parse_double(fields[2]);
    m = std::max(m, j + 1);
  }
  require(m > 0 && cells.size() == static_cast<std::size_t>(m) * static_cast<std::size_t>(m + 1),
          "read_ground_truth_csv: incomplete coefficient table");
  Eigen::MatrixXd entries(m + 1, m);
  for (const auto& [key, value] : cells) {
    require(key.second <= m, "read_ground_truth_csv: ell out of range");
    entries(key.second, key.first) = value;
  }
  return CoeffMatrix(std::move(entries));
}

}  // namespace pricebounds
