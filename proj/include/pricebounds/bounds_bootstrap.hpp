#pragma once

#include <cstdint>

#include "pricebounds/core_model.hpp"
#include "pricebounds/price_optimizer.hpp"

namespace pricebounds {

struct BootstrapConfig {
  int n_bootstrap = 100;
  double kappa = 1.645;

  void validate() const;
};

/// Optimal prices of every bootstrap replicate, one row per replicate,
/// together with their per-item mean and sample standard deviation
/// (divisor N - 1).
struct BootstrapReplicates {
  Eigen::MatrixXd prices;
  Eigen::VectorXd mean;
  Eigen::VectorXd sd;
};

/// Draws n_bootstrap resamples with replacement, refits OLS on each and
/// solves the revenue problem over the full envelope. Replicate b uses the
/// stream derive_seed(seed, b), so the result does not depend on the
/// number of OpenMP threads.
BootstrapReplicates bootstrap_replicates(const PriceDemandDataset& data,
                                         const PriceEnvelope& envelope, int n_bootstrap,
                                         const QpSolverConfig& qp, std::uint64_t seed);

/// alpha = max(pmin, mean - kappa sd), beta = min(pmax, mean + kappa sd).
/// An infinite kappa returns the whole envelope.
PriceBox bounds_from_replicates(const BootstrapReplicates& replicates,
                                const PriceEnvelope& envelope, double kappa);

PriceBox bootstrap_bounds(const PriceDemandDataset& data, const PriceEnvelope& envelope,
                          const BootstrapConfig& cfg, const QpSolverConfig& qp,
                          std::uint64_t seed);

/// Two-sided standard normal critical value for a confidence level in
/// (0, 1]. Tabulated levels: 0.60, 0.65, ..., 0.95, 0.99, 1.0 (infinite).
/// Other levels throw ContractViolation.
double kappa_for_confidence(double level);

}  // namespace pricebounds
