#include "pricebounds/bounds_bootstrap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pricebounds/errors.hpp"
#include "pricebounds/ols_fit.hpp"
#include "pricebounds/rng.hpp"

namespace pricebounds {

void BootstrapConfig::validate() const {
  require(n_bootstrap >= 2, "BootstrapConfig: n_bootstrap must be at least 2");
  require(kappa >= 0.0 && !std::isnan(kappa), "BootstrapConfig: kappa must be >= 0");
}

namespace detail {

// Replicate b: resample with stream derive_seed(seed, b), refit, solve over
// the envelope with a QP seed derived from the same stream.
PriceVector bootstrap_replicate(const PriceDemandDataset& data, const PriceEnvelope& envelope,
                                const QpSolverConfig& qp, std::uint64_t seed, int b) {
  const std::uint64_t stream = derive_seed(seed, static_cast<std::uint64_t>(b));
  CounterRng rng(stream);
  const auto n = static_cast<std::size_t>(data.size());
  std::vector<int> rows(n);
  for (auto& r : rows) r = static_cast<int>(rng.index(n));
  const RevenueQp fitted(fit_ols(data, rows));
  return maximize_revenue_boxed(fitted, envelope.lower(), envelope.upper(), qp,
                                derive_seed(stream, 1));
}

void summarize_replicates(BootstrapReplicates& out) {
  const auto count = out.prices.rows();
  const auto m = out.prices.cols();
  out.mean = Eigen::VectorXd::Zero(m);
  out.sd = Eigen::VectorXd::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    double sum = 0.0;
    for (Eigen::Index b = 0; b < count; ++b) sum += out.prices(b, j);
    const double mean = sum / static_cast<double>(count);
    double squares = 0.0;
    for (Eigen::Index b = 0; b < count; ++b) {
      const double dev = out.prices(b, j) - mean;
      squares += dev * dev;
    }
    out.mean(j) = mean;
    out.sd(j) = std::sqrt(squares / static_cast<double>(count - 1));
  }
}

}  // namespace detail

BootstrapReplicates bootstrap_replicates(const PriceDemandDataset& data,
                                         const PriceEnvelope& envelope, int n_bootstrap,
                                         const QpSolverConfig& qp, std::uint64_t seed) {
  require(n_bootstrap >= 2, "bootstrap_replicates: n_bootstrap must be at least 2");
  require(data.size() >= 2, "bootstrap_replicates: need at least two instances");
  require(envelope.items() == data.items(), "bootstrap_replicates: envelope size differs from m");
  qp.validate();

  BootstrapReplicates out;
  out.prices.resize(n_bootstrap, data.items());
  // Each replicate owns its row and its seed stream, so the result is the
  // same for any thread count.
#pragma omp parallel for schedule(dynamic)
  for (int b = 0; b < n_bootstrap; ++b)
    out.prices.row(b) = detail::bootstrap_replicate(data, envelope, qp, seed, b).transpose();

  detail::summarize_replicates(out);
  return out;
}

PriceBox bounds_from_replicates(const BootstrapReplicates& replicates,
                                const PriceEnvelope& envelope, double kappa) {
  require(kappa >= 0.0 && !std::isnan(kappa), "bounds_from_replicates: kappa must be >= 0");
  require(replicates.mean.size() == envelope.items(),
          "bounds_from_replicates: envelope size differs from m");
  if (std::isinf(kappa)) return PriceBox::full(envelope);

  const auto m = envelope.items();
  PriceVector alpha(m);
  PriceVector beta(m);
  for (int j = 0; j < m; ++j) {
    const double half = kappa * replicates.sd(j);
    alpha(j) = std::max(envelope.lower()(j), replicates.mean(j) - half);
    beta(j) = std::min(envelope.upper()(j), replicates.mean(j) + half);
    // A mean outside the envelope would otherwise cross the clipped bounds.
    alpha(j) = std::min(alpha(j), envelope.upper()(j));
    beta(j) = std::max(beta(j), envelope.lower()(j));
  }
  return {std::move(alpha), std::move(beta), envelope};
}

PriceBox bootstrap_bounds(const PriceDemandDataset& data, const PriceEnvelope& envelope,
                          const BootstrapConfig& cfg, const QpSolverConfig& qp,
                          std::uint64_t seed) {
  cfg.validate();
  return bounds_from_replicates(bootstrap_replicates(data, envelope, cfg.n_bootstrap, qp, seed),
                                envelope, cfg.kappa);
}

double kappa_for_confidence(double level) {
  static constexpr std::array<std::pair<double, double>, 10> kTable{{
      {0.60, 0.841},
      {0.65, 0.935},
      {0.70, 1.036},
      {0.75, 1.150},
      {0.80, 1.282},
      {0.85, 1.440},
      {0.90, 1.645},
      {0.95, 1.960},
      {0.99, 2.576},
      {1.00, std::numeric_limits<double>::infinity()},
  }};
  for (const auto& [confidence, kappa] : kTable)
    if (std::abs(level - confidence) < 1e-9) return kappa;
  throw ContractViolation("kappa_for_confidence: no tabulated critical value for level " +
                          std::to_string(level));
}

}  // namespace pricebounds
