#pragma once

#include <span>

#include "pricebounds/core_model.hpp"

namespace pricebounds {

/// Least-squares demand coefficients, one regression per item on an
/// intercept plus all m prices. Rank-deficient designs get the
/// minimum-norm solution.
CoeffMatrix fit_ols(const PriceDemandDataset& data);

/// Same fit restricted to the listed rows (repeats allowed, as in a
/// bootstrap resample).
CoeffMatrix fit_ols(const PriceDemandDataset& data, std::span<const int> rows);

}  // namespace pricebounds
