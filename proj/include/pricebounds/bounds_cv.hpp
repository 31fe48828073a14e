#pragma once

#include <cstdint>
#include <vector>

#include "pricebounds/core_model.hpp"
#include "pricebounds/nelder_mead.hpp"
#include "pricebounds/price_optimizer.hpp"

namespace pricebounds {

struct CvConfig {
  int k_folds = 5;
  double gamma = 3.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  NmConfig nm;
  QpSolverConfig qp;

  void validate() const;
};

struct QuantileConfig {
  double q = 1.0;

  void validate() const;
};

/// Seeded partition of [0, n) into k folds whose sizes differ by at most one.
std::vector<std::vector<int>> make_folds(int n, int k, std::uint64_t seed);

/// One fold's training/validation fits, prepared for repeated solves.
struct CvFold {
  RevenueQp train;
  RevenueQp validation;
  std::uint64_t qp_seed;
};

/// K-fold revenue estimator with the folds and their OLS fits computed once,
/// so that evaluating many candidate boxes is a deterministic function of
/// the box alone.
class CvRevenueEstimator {
 public:
  CvRevenueEstimator(const PriceDemandDataset& data, const CvConfig& cfg, std::uint64_t seed);

  int items() const noexcept { return items_; }
  int folds() const noexcept { return static_cast<int>(folds_.size()); }
  const std::vector<CvFold>& fold_fits() const noexcept { return folds_; }
  /// Instance indices of each validation fold.
  const std::vector<std::vector<int>>& partition() const noexcept { return partition_; }

  /// Validation revenue of the training-optimal prices, per fold.
  /// Parallel over folds; see reference::cv_fold_revenues.
  Eigen::VectorXd fold_revenues(const PriceVector& lower, const PriceVector& upper) const;

  /// Average of fold_revenues. Throws InfeasibleBox if lower > upper.
  double estimate(const PriceVector& lower, const PriceVector& upper) const;

  const QpSolverConfig& qp() const noexcept { return qp_; }

 private:
  int items_;
  QpSolverConfig qp_;
  std::vector<std::vector<int>> partition_;
  std::vector<CvFold> folds_;
};

/// One-shot cross-validated revenue of the inner solution under `box`.
double cv_revenue_estimate(const PriceDemandDataset& data, const PriceBox& box,
                           const CvConfig& cfg, std::uint64_t seed);

/// g(x) = max(x, 0)^2.
inline double squared_hinge(double x) { return x > 0.0 ? x * x : 0.0; }

/// CV revenue minus the width-budget and ordering penalties. `alphabeta`
/// concatenates alpha (first m entries) and beta. Crossed items are set to
/// their midpoint for the inner solve, but the penalties use the values as
/// given. Non-finite CV values come back as -infinity.
double cv_penalized_objective(const CvRevenueEstimator& estimator,
                              const Eigen::VectorXd& alphabeta, const CvConfig& cfg);

double cv_penalized_objective(const PriceDemandDataset& data, const Eigen::VectorXd& alphabeta,
                              const CvConfig& cfg, std::uint64_t seed);

/// Order repair (crossed items to their midpoint), then uniform width
/// scaling about the midpoints until the total width is at most `gamma`.
PriceBox project_to_budget(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                           const PriceEnvelope& envelope, double gamma);

struct CvSearchResult {
  PriceBox box;
  NmResult search;
};

/// Nelder-Mead search over (alpha, beta) for the penalized CV objective,
/// followed by projection to a hard-feasible box.
CvSearchResult cv_bounds_search_detailed(const PriceDemandDataset& data,
                                         const PriceEnvelope& envelope, const CvConfig& cfg,
                                         std::uint64_t seed);

PriceBox cv_bounds_search(const PriceDemandDataset& data, const PriceEnvelope& envelope,
                          const CvConfig& cfg, std::uint64_t seed);

/// Empirical quantile with linear interpolation between order statistics.
double empirical_quantile(std::vector<double> values, double level);

/// Central q-coverage interval of each item's historical prices, clipped to
/// the envelope.
PriceBox quantile_bounds(const PriceDemandDataset& data, const PriceEnvelope& envelope,
                         const QuantileConfig& cfg);

}  // namespace pricebounds
