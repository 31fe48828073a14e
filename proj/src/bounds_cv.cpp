#include "pricebounds/bounds_cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "pricebounds/errors.hpp"
#include "pricebounds/ols_fit.hpp"
#include "pricebounds/rng.hpp"

namespace pricebounds {

namespace {
constexpr std::uint64_t kFoldStream = 0xF01D;
constexpr std::uint64_t kFoldQpStream = 0x0F01D000;
constexpr std::uint64_t kEstimatorStream = 1;
constexpr std::uint64_t kSearchStream = 2;
}  // namespace

void CvConfig::validate() const {
  require(k_folds >= 2, "CvConfig: k_folds must be at least 2");
  require(gamma >= 0.0 && std::isfinite(gamma), "CvConfig: gamma must be finite and >= 0");
  require(lambda1 >= 0.0 && lambda2 >= 0.0, "CvConfig: penalty weights must be >= 0");
  nm.validate();
  qp.validate();
}

void QuantileConfig::validate() const {
  require(q > 0.0 && q <= 1.0, "QuantileConfig: q must lie in (0, 1]");
}

std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed) {
  require(k >= 1 && k <= n, "make_folds: need 1 <= K <= n");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  CounterRng rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);

  std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    const auto begin = static_cast<std::size_t>(static_cast<long>(f) * n / k);
    const auto end = static_cast<std::size_t>(static_cast<long>(f + 1) * n / k);
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.assign(order.begin() + static_cast<long>(begin), order.begin() + static_cast<long>(end));
    std::sort(fold.begin(), fold.end());
  }
  return folds;
}

CvRevenueEstimator::CvRevenueEstimator(const PriceDemandDataset& data, const CvConfig& cfg,
                                       std::uint64_t seed)
    : items_(data.items()), qp_(cfg.qp) {
  cfg.validate();
  require(cfg.k_folds <= data.size(), "CvRevenueEstimator: K exceeds the number of instances");

  partition_ = make_folds(data.size(), cfg.k_folds, derive_seed(seed, kFoldStream));
  const auto& partition = partition_;
  std::vector<char> in_fold(static_cast<std::size_t>(data.size()));
  folds_.reserve(partition.size());
  for (std::size_t f = 0; f < partition.size(); ++f) {
    std::fill(in_fold.begin(), in_fold.end(), 0);
    for (int i : partition[f]) in_fold[static_cast<std::size_t>(i)] = 1;
    std::vector<int> train;
    train.reserve(in_fold.size() - partition[f].size());
    for (int i = 0; i < data.size(); ++i)
      if (!in_fold[static_cast<std::size_t>(i)]) train.push_back(i);
    folds_.push_back(CvFold{RevenueQp(fit_ols(data, train)), RevenueQp(fit_ols(data, partition[f])),
                            derive_seed(seed, kFoldQpStream + f)});
  }
}

Eigen::VectorXd CvRevenueEstimator::fold_revenues(const PriceVector& lower,
                                                  const PriceVector& upper) const {
  require(lower.size() == items_ && upper.size() == items_,
          "CvRevenueEstimator: bound lengths differ from m");
  if ((lower.array() > upper.array()).any())
    throw InfeasibleBox("CvRevenueEstimator: lower > upper");

  const int k = folds();
  Eigen::VectorXd revenue(k);
#pragma omp parallel for schedule(static) if (k > 1)
  for (int f = 0; f < k; ++f) {
    const CvFold& fold = folds_[static_cast<std::size_t>(f)];
    const PriceVector p = maximize_revenue_boxed(fold.train, lower, upper, qp_, fold.qp_seed);
    revenue(f) = fold.validation.value(p);
  }
  return revenue;
}

double CvRevenueEstimator::estimate(const PriceVector& lower, const PriceVector& upper) const {
  const Eigen::VectorXd revenue = fold_revenues(lower, upper);
  double total = 0.0;
  for (Eigen::Index f = 0; f < revenue.size(); ++f) total += revenue(f);
  return total / static_cast<double>(revenue.size());
}

double cv_revenue_estimate(const PriceDemandDataset& data, const PriceBox& box,
                           const CvConfig& cfg, std::uint64_t seed) {
  return CvRevenueEstimator(data, cfg, seed).estimate(box.alpha(), box.beta());
}

double cv_penalized_objective(const CvRevenueEstimator& estimator,
                              const Eigen::VectorXd& alphabeta, const CvConfig& cfg) {
  const int m = estimator.items();
  require(alphabeta.size() == 2 * m, "cv_penalized_objective: expected a 2m-vector");
  const Eigen::VectorXd alpha = alphabeta.head(m);
  const Eigen::VectorXd beta = alphabeta.tail(m);

  Eigen::VectorXd lower = alpha;
  Eigen::VectorXd upper = beta;
  double order_penalty = 0.0;
  for (int j = 0; j < m; ++j) {
    order_penalty += squared_hinge(alpha(j) - beta(j));
    if (alpha(j) > beta(j)) lower(j) = upper(j) = 0.5 * (alpha(j) + beta(j));
  }
  const double width_penalty = squared_hinge((beta - alpha).sum() - cfg.gamma);

  const double cv = estimator.estimate(lower, upper);
  if (!std::isfinite(cv)) return -std::numeric_limits<double>::infinity();
  return cv - cfg.lambda1 * width_penalty - cfg.lambda2 * order_penalty;
}

double cv_penalized_objective(const PriceDemandDataset& data, const Eigen::VectorXd& alphabeta,
                              const CvConfig& cfg, std::uint64_t seed) {
  const CvRevenueEstimator estimator(data, cfg, derive_seed(seed, kEstimatorStream));
  return cv_penalized_objective(estimator, alphabeta, cfg);
}

PriceBox project_to_budget(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                           const PriceEnvelope& envelope, double gamma) {
  require(gamma >= 0.0, "project_to_budget: gamma must be >= 0");
  const PriceVector& pmin = envelope.lower();
  const PriceVector& pmax = envelope.upper();
  PriceVector lo = alpha.cwiseMax(pmin).cwiseMin(pmax);
  PriceVector hi = beta.cwiseMax(pmin).cwiseMin(pmax);
  for (int j = 0; j < envelope.items(); ++j)
    if (lo(j) > hi(j)) lo(j) = hi(j) = 0.5 * (lo(j) + hi(j));

  const double total = (hi - lo).sum();
  if (total > gamma) {
    const double scale = gamma / total;
    for (int j = 0; j < envelope.items(); ++j) {
      const double mid = 0.5 * (lo(j) + hi(j));
      const double half = 0.5 * (hi(j) - lo(j)) * scale;
      lo(j) = std::max(pmin(j), mid - half);
      hi(j) = std::min(pmax(j), std::max(lo(j), mid + half));
    }
  }
  return {std::move(lo), std::move(hi), envelope};
}

CvSearchResult cv_bounds_search_detailed(const PriceDemandDataset& data,
                                         const PriceEnvelope& envelope, const CvConfig& cfg,
                                         std::uint64_t seed) {
  cfg.validate();
  const int m = data.items();
  require(envelope.items() == m, "cv_bounds_search: envelope size differs from m");

  const PriceVector span = envelope.upper() - envelope.lower();
  const PriceBox start_box = project_to_budget(envelope.lower() + 0.25 * span,
                                               envelope.upper() - 0.25 * span, envelope, cfg.gamma);

  Eigen::VectorXd lower(2 * m), upper(2 * m), start(2 * m);
  lower << envelope.lower(), envelope.lower();
  upper << envelope.upper(), envelope.upper();
  start << start_box.alpha(), start_box.beta();

  const CvRevenueEstimator estimator(data, cfg, derive_seed(seed, kEstimatorStream));
  NmResult search = nm_maximize(
      [&](const Eigen::VectorXd& x) { return cv_penalized_objective(estimator, x, cfg); }, lower,
      upper, start, cfg.nm, derive_seed(seed, kSearchStream));

  PriceBox box = project_to_budget(search.x.head(m), search.x.tail(m), envelope, cfg.gamma);
  return {std::move(box), std::move(search)};
}

PriceBox cv_bounds_search(const PriceDemandDataset& data, const PriceEnvelope& envelope,
                          const CvConfig& cfg, std::uint64_t seed) {
  return cv_bounds_search_detailed(data, envelope, cfg, seed).box;
}

double empirical_quantile(std::vector<double> values, double level) {
  require(!values.empty(), "empirical_quantile: no values");
  require(level >= 0.0 && level <= 1.0, "empirical_quantile: level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

PriceBox quantile_bounds(const PriceDemandDataset& data, const PriceEnvelope& envelope,
                         const QuantileConfig& cfg) {
  cfg.validate();
  const int m = data.items();
  require(envelope.items() == m, "quantile_bounds: envelope size differs from m");
  PriceVector alpha(m), beta(m);
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd column = data.prices().col(j);
    std::vector<double> values(column.data(), column.data() + column.size());
    const double lo = empirical_quantile(values, 0.5 * (1.0 - cfg.q));
    const double hi = empirical_quantile(std::move(values), 0.5 * (1.0 + cfg.q));
    alpha(j) = std::clamp(lo, envelope.lower()(j), envelope.upper()(j));
    beta(j) = std::clamp(hi, envelope.lower()(j), envelope.upper()(j));
  }
  return {std::move(alpha), std::move(beta), envelope};
}

}  // namespace pricebounds
