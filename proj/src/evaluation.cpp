#include "pricebounds/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pricebounds/errors.hpp"

namespace pricebounds {

double relative_revenue(const CoeffMatrix& theta_star, const PriceVector& p_hat,
                        const PriceVector& p_star) {
  const double best = eval_revenue(theta_star, p_star);
  if (!(best > 0.0))
    throw FlaggedTrial("relative_revenue: optimal revenue is not positive (" +
                       std::to_string(best) + ")");
  return eval_revenue(theta_star, p_hat) / best;
}

double average_width(const PriceBox& box) { return box.widths().mean(); }

std::vector<double> per_item_r2(const CoeffMatrix& theta_hat, const PriceDemandDataset& data) {
  require(theta_hat.items() == data.items(), "per_item_r2: item counts differ");
  require(data.size() >= 2, "per_item_r2: need at least two instances");
  const int m = data.items();
  Eigen::MatrixXd predicted = data.prices() * theta_hat.entries().bottomRows(m);
  predicted.rowwise() += theta_hat.entries().row(0);

  std::vector<double> r2(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const auto observed = data.demands().col(j);
    const double mean = observed.mean();
    const double sst = (observed.array() - mean).square().sum();
    const double sse = (observed - predicted.col(j)).squaredNorm();
    r2[static_cast<std::size_t>(j)] =
        sst > 0.0 ? 1.0 - sse / sst : std::numeric_limits<double>::quiet_NaN();
  }
  return r2;
}

namespace {
std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t k = i;
    while (k + 1 < order.size() && values[order[k + 1]] == values[order[i]]) ++k;
    const double rank = 0.5 * static_cast<double>(i + k) + 1.0;
    for (std::size_t t = i; t <= k; ++t) ranks[order[t]] = rank;
    i = k + 1;
  }
  return ranks;
}
}  // namespace

double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "spearman_correlation: length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    xs.push_back(x[i]);
    ys.push_back(y[i]);
  }
  require(xs.size() >= 2, "spearman_correlation: need at least two complete pairs");
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

MeanSem mean_and_sem(const std::vector<double>& values) {
  MeanSem out;
  out.count = static_cast<int>(values.size());
  if (values.empty()) {
    out.mean = out.sem = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() < 2) {
    out.sem = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double squares = 0.0;
  for (double v : values) squares += (v - out.mean) * (v - out.mean);
  out.sem = std::sqrt(squares / (n - 1.0)) / std::sqrt(n);
  return out;
}

}  // namespace pricebounds
