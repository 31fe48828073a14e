#include "pricebounds/ols_fit.hpp"

#include <numeric>
#include <vector>

#include "pricebounds/errors.hpp"

namespace pricebounds {

CoeffMatrix fit_ols(const PriceDemandDataset& data) {
  std::vector<int> rows(data.size());
  std::iota(rows.begin(), rows.end(), 0);
  return fit_ols(data, rows);
}

CoeffMatrix fit_ols(const PriceDemandDataset& data, std::span<const int> rows) {
  require(!rows.empty(), "fit_ols: empty dataset");
  const int m = data.items();
  const auto n = static_cast<Eigen::Index>(rows.size());

  Eigen::MatrixXd design(n, m + 1);
  Eigen::MatrixXd response(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const int i = rows[static_cast<std::size_t>(r)];
    require(i >= 0 && i < data.size(), "fit_ols: row index out of range");
    design(r, 0) = 1.0;
    design.row(r).tail(m) = data.prices().row(i);
    response.row(r) = data.demands().row(i);
  }

  // Complete orthogonal decomposition yields the minimum-norm solution when
  // the design is rank deficient.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  return CoeffMatrix(cod.solve(response));
}

}  // namespace pricebounds
