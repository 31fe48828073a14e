#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>

#include "pricebounds/core_model.hpp"
#include "pricebounds/price_optimizer.hpp"

namespace pricebounds {

struct SyntheticSpec {
  int m = 5;
  int n = 1000;
  double delta = 0.25;
  double price_mean = 0.8;
  double price_sd = 0.1;
  bool independent_noise = false;  // one noise draw per (i, j) instead of per i
  std::uint64_t seed = 0;

  void validate() const;
};

/// intercepts ~ U(m, 3m), own-price effects ~ U(-3m, -2m),
/// cross-price effects ~ U(0, 3).
CoeffMatrix sample_ground_truth(const SyntheticSpec& spec);

/// sigma = delta * sqrt(M / (1 - delta^2)) where M is the mean squared
/// noise-free demand. This makes sigma^2 / E[d^2] = delta^2.
double calibrate_noise_sigma(const CoeffMatrix& theta_star, const Eigen::MatrixXd& prices,
                             double delta);

/// sqrt(n m sigma^2 / sum d_ij^2), the noise level realized by a dataset.
double realized_noise_level(const PriceDemandDataset& data, double sigma);

struct SyntheticTrial {
  CoeffMatrix theta_star;
  PriceDemandDataset data;
  double sigma;
};

SyntheticTrial generate_dataset(const SyntheticSpec& spec);

PriceVector oracle_optimal_prices(const CoeffMatrix& theta_star, const PriceEnvelope& envelope,
                                  const QpSolverConfig& qp, std::uint64_t seed);

/// CSV with header `trial,i,item,price,demand`, one row per (instance, item).
void write_dataset_csv(std::ostream& out, const PriceDemandDataset& data, int trial = 0);
/// Reads the rows of one trial back. Instances and items are 0-based.
PriceDemandDataset read_dataset_csv(std::istream& in, int trial = 0);

/// CSV with header `item,ell,theta`; ell = 0 is the intercept.
void write_ground_truth_csv(std::ostream& out, const CoeffMatrix& theta);
CoeffMatrix read_ground_truth_csv(std::istream& in);

}  // namespace pricebounds
