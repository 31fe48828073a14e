#pragma once

#include <Eigen/Dense>

namespace pricebounds {

/// Prices of the m items, indexed 0..m-1.
using PriceVector = Eigen::VectorXd;

/// Linear demand coefficients, stored column-per-item as an (m+1) x m matrix.
/// Row 0 holds the intercepts; row 1+l holds the effect of price l on the
/// demand of the column's item.
class CoeffMatrix {
 public:
  explicit CoeffMatrix(Eigen::MatrixXd entries);

  int items() const noexcept { return static_cast<int>(entries_.cols()); }
  double intercept(int item) const { return entries_(0, item); }
  double effect(int item, int price_index) const { return entries_(1 + price_index, item); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }

  friend bool operator==(const CoeffMatrix&, const CoeffMatrix&) = default;

 private:
  Eigen::MatrixXd entries_;
};

/// n observations of (price vector, demand vector), stored as two n x m
/// matrices with one instance per row.
class PriceDemandDataset {
 public:
  PriceDemandDataset(Eigen::MatrixXd prices, Eigen::MatrixXd demands);

  int size() const noexcept { return static_cast<int>(prices_.rows()); }
  int items() const noexcept { return static_cast<int>(prices_.cols()); }
  const Eigen::MatrixXd& prices() const noexcept { return prices_; }
  const Eigen::MatrixXd& demands() const noexcept { return demands_; }

 private:
  Eigen::MatrixXd prices_;
  Eigen::MatrixXd demands_;
};

/// Hard outer limits on admissible prices (p^min, p^max).
class PriceEnvelope {
 public:
  PriceEnvelope(PriceVector lower, PriceVector upper);
  static PriceEnvelope uniform(int items, double lower, double upper);

  int items() const noexcept { return static_cast<int>(lower_.size()); }
  const PriceVector& lower() const noexcept { return lower_; }
  const PriceVector& upper() const noexcept { return upper_; }

 private:
  PriceVector lower_;
  PriceVector upper_;
};

/// Per-item price bounds [alpha, beta] inside an envelope. The constructor
/// enforces pmin <= alpha <= beta <= pmax elementwise.
class PriceBox {
 public:
  PriceBox(PriceVector alpha, PriceVector beta, PriceEnvelope envelope);

  /// The box spanning the whole envelope.
  static PriceBox full(const PriceEnvelope& envelope);

  int items() const noexcept { return static_cast<int>(alpha_.size()); }
  const PriceVector& alpha() const noexcept { return alpha_; }
  const PriceVector& beta() const noexcept { return beta_; }
  const PriceEnvelope& envelope() const noexcept { return envelope_; }
  const PriceVector& pmin() const noexcept { return envelope_.lower(); }
  const PriceVector& pmax() const noexcept { return envelope_.upper(); }

  Eigen::VectorXd widths() const { return beta_ - alpha_; }

 private:
  PriceVector alpha_;
  PriceVector beta_;
  PriceEnvelope envelope_;
};

/// f(p) = p^T A p + b^T p, the revenue written as a quadratic form.
struct QuadraticForm {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  double value(const PriceVector& p) const { return p.dot(A * p) + b.dot(p); }
  Eigen::VectorXd gradient(const PriceVector& p) const { return 2.0 * (A * p) + b; }
};

/// Demand of `item` (0-based) at prices p. Not clamped at zero.
double eval_demand(const CoeffMatrix& theta, const PriceVector& p, int item);

/// Total revenue sum_j d_j(p) p_j.
double eval_revenue(const CoeffMatrix& theta, const PriceVector& p);

QuadraticForm quadratic_coeffs(const CoeffMatrix& theta);

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& x);

}  // namespace pricebounds
