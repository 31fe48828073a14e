#pragma once

// Serial reference versions of the OpenMP kernels. They share no loop code
// with the parallel versions and are kept for equivalence tests and the
// benchmark target.

#include <cstdint>

#include "pricebounds/bounds_bootstrap.hpp"
#include "pricebounds/bounds_cv.hpp"
#include "pricebounds/core_model.hpp"

namespace pricebounds::reference {

BootstrapReplicates bootstrap_replicates(const PriceDemandDataset& data,
                                         const PriceEnvelope& envelope, int n_bootstrap,
                                         const QpSolverConfig& qp, std::uint64_t seed);

Eigen::VectorXd cv_fold_revenues(const CvRevenueEstimator& estimator, const PriceVector& lower,
                                 const PriceVector& upper);

PriceVector grid_oracle(const CoeffMatrix& theta, const PriceVector& lower,
                        const PriceVector& upper, double resolution);

}  // namespace pricebounds::reference
