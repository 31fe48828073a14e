#pragma once

#include <vector>

#include "pricebounds/core_model.hpp"

namespace pricebounds {

struct TrialMetrics {
  double relative_revenue = 0.0;
  double average_width = 0.0;
  std::vector<double> per_item_r2;
  double wall_time_bounds_s = 0.0;
  double wall_time_total_s = 0.0;
};

/// f(p_hat, theta*) / f(p*, theta*). Throws FlaggedTrial when the optimal
/// revenue is not positive.
double relative_revenue(const CoeffMatrix& theta_star, const PriceVector& p_hat,
                        const PriceVector& p_star);

double average_width(const PriceBox& box);

/// In-sample R^2 of each item's demand regression. Items whose demand has
/// zero variance get NaN.
std::vector<double> per_item_r2(const CoeffMatrix& theta_hat, const PriceDemandDataset& data);

/// Spearman rank correlation with average ranks for ties. Pairs with a NaN
/// on either side are dropped.
double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct MeanSem {
  double mean = 0.0;
  double sem = 0.0;  // sample sd / sqrt(count); NaN below two samples
  int count = 0;
};

MeanSem mean_and_sem(const std::vector<double>& values);

}  // namespace pricebounds
