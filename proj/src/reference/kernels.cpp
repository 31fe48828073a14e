#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pricebounds/errors.hpp"
#include "pricebounds/ols_fit.hpp"
#include "pricebounds/reference.hpp"
#include "pricebounds/rng.hpp"

namespace pricebounds::reference {

BootstrapReplicates bootstrap_replicates(const PriceDemandDataset& data,
                                         const PriceEnvelope& envelope, int n_bootstrap,
                                         const QpSolverConfig& qp, std::uint64_t seed) {
  require(n_bootstrap >= 2 && data.size() >= 2, "reference::bootstrap_replicates: bad sizes");
  const int n = data.size();
  const int m = data.items();
  BootstrapReplicates out;
  out.prices.resize(n_bootstrap, m);
  std::vector<int> rows(static_cast<std::size_t>(n));
  for (int b = 0; b < n_bootstrap; ++b) {
    const std::uint64_t stream = derive_seed(seed, static_cast<std::uint64_t>(b));
    CounterRng rng(stream);
    for (int i = 0; i < n; ++i)
      rows[static_cast<std::size_t>(i)] = static_cast<int>(rng.index(static_cast<std::size_t>(n)));
    const CoeffMatrix theta = fit_ols(data, rows);
    out.prices.row(b) =
        maximize_revenue_boxed(theta, envelope.lower(), envelope.upper(), qp, derive_seed(stream, 1))
            .transpose();
  }
  out.mean.resize(m);
  out.sd.resize(m);
  for (int j = 0; j < m; ++j) {
    // Plain left-to-right sums, so the result is bit-comparable.
    double sum = 0.0;
    for (int b = 0; b < n_bootstrap; ++b) sum += out.prices(b, j);
    out.mean(j) = sum / n_bootstrap;
    double squares = 0.0;
    for (int b = 0; b < n_bootstrap; ++b) {
      const double dev = out.prices(b, j) - out.mean(j);
      squares += dev * dev;
    }
    out.sd(j) = std::sqrt(squares / (n_bootstrap - 1));
  }
  return out;
}

Eigen::VectorXd cv_fold_revenues(const CvRevenueEstimator& estimator, const PriceVector& lower,
                                 const PriceVector& upper) {
  const auto& folds = estimator.fold_fits();
  Eigen::VectorXd revenue(static_cast<Eigen::Index>(folds.size()));
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const PriceVector p =
        maximize_revenue_boxed(folds[f].train, lower, upper, estimator.qp(), folds[f].qp_seed);
    revenue(static_cast<Eigen::Index>(f)) = folds[f].validation.value(p);
  }
  return revenue;
}

PriceVector grid_oracle(const CoeffMatrix& theta, const PriceVector& lower,
                        const PriceVector& upper, double resolution) {
  if (theta.items() > kGridOracleMaxItems)
    throw GuardRefusal("reference::grid_oracle: m exceeds the exhaustive-search guard");
  require(resolution > 0.0, "reference::grid_oracle: resolution must be > 0");
  const int m = theta.items();
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    for (long k = 0;; ++k) {
      const double x = lower(j) + static_cast<double>(k) * resolution;
      if (x > upper(j) + 1e-9 * resolution) break;
      axes[static_cast<std::size_t>(j)].push_back(std::min(x, upper(j)));
    }
    if (axes[static_cast<std::size_t>(j)].back() < upper(j))
      axes[static_cast<std::size_t>(j)].push_back(upper(j));
  }

  std::vector<std::size_t> index(static_cast<std::size_t>(m), 0);
  PriceVector p(m), best_p(m);
  double best = -std::numeric_limits<double>::infinity();
  for (;;) {
    for (int j = 0; j < m; ++j) p(j) = axes[static_cast<std::size_t>(j)][index[static_cast<std::size_t>(j)]];
    const double value = eval_revenue(theta, p);
    if (value > best) {
      best = value;
      best_p = p;
    }
    int j = m - 1;
    while (j >= 0 && ++index[static_cast<std::size_t>(j)] == axes[static_cast<std::size_t>(j)].size()) {
      index[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return best_p;
}

}  // namespace pricebounds::reference
