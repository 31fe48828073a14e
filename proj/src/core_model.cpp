#include "pricebounds/core_model.hpp"

#include <string>
#include <utility>

#include "pricebounds/errors.hpp"

namespace pricebounds {

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& x) { return x.allFinite(); }

CoeffMatrix::CoeffMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require(entries_.cols() >= 1, "CoeffMatrix: need at least one item");
  require(entries_.rows() == entries_.cols() + 1,
          "CoeffMatrix: expected (m+1) x m entries, got " + std::to_string(entries_.rows()) +
              " x " + std::to_string(entries_.cols()));
  require(entries_.allFinite(), "CoeffMatrix: non-finite coefficient");
}

PriceDemandDataset::PriceDemandDataset(Eigen::MatrixXd prices, Eigen::MatrixXd demands)
    : prices_(std::move(prices)), demands_(std::move(demands)) {
  require(prices_.rows() >= 1, "PriceDemandDataset: empty dataset");
  require(prices_.cols() >= 1, "PriceDemandDataset: need at least one item");
  require(prices_.rows() == demands_.rows() && prices_.cols() == demands_.cols(),
          "PriceDemandDataset: price and demand shapes differ");
  require(prices_.allFinite() && demands_.allFinite(), "PriceDemandDataset: non-finite entry");
}

PriceEnvelope::PriceEnvelope(PriceVector lower, PriceVector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(lower_.size() >= 1 && lower_.size() == upper_.size(),
          "PriceEnvelope: bound lengths differ or are empty");
  require(lower_.allFinite() && upper_.allFinite(), "PriceEnvelope: non-finite bound");
  if ((lower_.array() > upper_.array()).any())
    throw InfeasibleBox("PriceEnvelope: pmin > pmax");
}

PriceEnvelope PriceEnvelope::uniform(int items, double lower, double upper) {
  return {PriceVector::Constant(items, lower), PriceVector::Constant(items, upper)};
}

PriceBox::PriceBox(PriceVector alpha, PriceVector beta, PriceEnvelope envelope)
    : alpha_(std::move(alpha)), beta_(std::move(beta)), envelope_(std::move(envelope)) {
  require(alpha_.size() == envelope_.items() && beta_.size() == envelope_.items(),
          "PriceBox: bound lengths differ from the envelope");
  require(alpha_.allFinite() && beta_.allFinite(), "PriceBox: non-finite bound");
  if ((alpha_.array() > beta_.array()).any()) throw InfeasibleBox("PriceBox: alpha > beta");
  require((alpha_.array() >= envelope_.lower().array()).all() &&
              (beta_.array() <= envelope_.upper().array()).all(),
          "PriceBox: bounds leave the envelope");
}

PriceBox PriceBox::full(const PriceEnvelope& envelope) {
  return {envelope.lower(), envelope.upper(), envelope};
}

double eval_demand(const CoeffMatrix& theta, const PriceVector& p, int item) {
  require(item >= 0 && item < theta.items(), "eval_demand: item index out of range");
  require(p.size() == theta.items(), "eval_demand: price vector length differs from m");
  const auto column = theta.entries().col(item);
  return column(0) + column.tail(theta.items()).dot(p);
}

double eval_revenue(const CoeffMatrix& theta, const PriceVector& p) {
  require(p.size() == theta.items(), "eval_revenue: price vector length differs from m");
  double total = 0.0;
  for (int j = 0; j < theta.items(); ++j) total += eval_demand(theta, p, j) * p(j);
  return total;
}

QuadraticForm quadratic_coeffs(const CoeffMatrix& theta) {
  const int m = theta.items();
  // effects(l, j) = theta_{j l}; revenue = sum_j p_j sum_l theta_{jl} p_l.
  const Eigen::MatrixXd effects = theta.entries().bottomRows(m);
  QuadraticForm form;
  form.A = 0.5 * (effects + effects.transpose());
  form.b = theta.entries().row(0).transpose();
  return form;
}

}  // namespace pricebounds
