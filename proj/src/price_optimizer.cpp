#include "pricebounds/price_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "pricebounds/errors.hpp"
#include "pricebounds/rng.hpp"

namespace pricebounds {

void QpSolverConfig::validate() const {
  require(restarts >= 1, "QpSolverConfig: restarts must be positive");
  require(max_iters >= 1, "QpSolverConfig: max_iters must be positive");
  require(std::isfinite(step_tol) && step_tol > 0.0, "QpSolverConfig: step_tol must be > 0");
  require(std::isfinite(value_tol) && value_tol > 0.0, "QpSolverConfig: value_tol must be > 0");
}

RevenueQp::RevenueQp(const CoeffMatrix& theta) : form_(quadratic_coeffs(theta)) {
  const Eigen::MatrixXd negated = -form_.A;
  Eigen::LLT<Eigen::MatrixXd> llt(negated);
  const double scale = form_.A.cwiseAbs().maxCoeff();
  concave_ = llt.info() == Eigen::Success && scale > 0.0 &&
             llt.matrixLLT().diagonal().minCoeff() > 1e-8 * std::sqrt(scale);
  lipschitz_ = 2.0 * form_.A.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(lipschitz_ > 0.0)) lipschitz_ = 1.0;
}

namespace {

PriceVector clip(const PriceVector& x, const PriceVector& lower, const PriceVector& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

void check_box(const RevenueQp& qp, const PriceVector& lower, const PriceVector& upper) {
  require(lower.size() == qp.items() && upper.size() == qp.items(),
          "maximize_revenue_boxed: bound lengths differ from m");
  require(lower.allFinite() && upper.allFinite(), "maximize_revenue_boxed: non-finite bound");
  for (int j = 0; j < qp.items(); ++j) {
    if (lower(j) > upper(j))
      throw InfeasibleBox("maximize_revenue_boxed: lower > upper for item " + std::to_string(j));
  }
}

double pg_norm(const PriceVector& x, const Eigen::VectorXd& g, const PriceVector& lower,
               const PriceVector& upper) {
  return (clip(x + g, lower, upper) - x).norm();
}

struct LocalSolution {
  PriceVector x;
  double value;
};

// Projected gradient ascent with Armijo backtracking; each iteration first
// tries a Newton step on the variables not pinned by an active bound.
LocalSolution ascend(const RevenueQp& qp, PriceVector x, const PriceVector& lower,
                     const PriceVector& upper, const QpSolverConfig& cfg) {
  constexpr double kArmijo = 1e-4;
  constexpr int kMaxHalvings = 40;
  const QuadraticForm& form = qp.form();
  const int m = qp.items();

  x = clip(x, lower, upper);
  double fx = form.value(x);
  const double rounding = 8.0 * std::numeric_limits<double>::epsilon();

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Eigen::VectorXd g = form.gradient(x);
    const double stationarity = pg_norm(x, g, lower, upper);
    if (stationarity <= cfg.step_tol) break;

    bool moved = false;

    std::vector<int> free;
    free.reserve(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) {
      const bool pinned_low = x(j) <= lower(j) && g(j) <= 0.0;
      const bool pinned_high = x(j) >= upper(j) && g(j) >= 0.0;
      if (!pinned_low && !pinned_high) free.push_back(j);
    }
    if (!free.empty()) {
      const auto k = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd hessian(k, k);
      Eigen::VectorXd g_free(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        g_free(a) = g(free[a]);
        for (Eigen::Index c = 0; c < k; ++c) hessian(a, c) = -2.0 * form.A(free[a], free[c]);
      }
      Eigen::LLT<Eigen::MatrixXd> llt(hessian);
      if (llt.info() == Eigen::Success) {
        const Eigen::VectorXd step_free = llt.solve(g_free);
        Eigen::VectorXd direction = Eigen::VectorXd::Zero(m);
        for (Eigen::Index a = 0; a < k; ++a) direction(free[a]) = step_free(a);
        double t = 1.0;
        for (int h = 0; h < kMaxHalvings && !moved; ++h, t *= 0.5) {
          const PriceVector y = clip(x + t * direction, lower, upper);
          const double fy = form.value(y);
          const double predicted = g.dot(y - x);
          const bool armijo = predicted > 0.0 && fy >= fx + kArmijo * predicted;
          const bool refines = fy >= fx - rounding * (1.0 + std::abs(fx)) &&
                               pg_norm(y, form.gradient(y), lower, upper) < stationarity;
          if (armijo || refines) {
            x = y;
            fx = fy;
            moved = true;
          }
        }
      }
    }

    if (!moved) {
      double t = 1.0 / qp.lipschitz();
      for (int h = 0; h < kMaxHalvings && !moved; ++h, t *= 0.5) {
        const PriceVector y = clip(x + t * g, lower, upper);
        const double fy = form.value(y);
        const double predicted = g.dot(y - x);
        if (predicted > 0.0 && fy >= fx + kArmijo * predicted) {
          x = y;
          fx = fy;
          moved = true;
        }
      }
    }

    if (!moved) break;
  }
  return {std::move(x), fx};
}

}  // namespace

double projected_gradient_norm(const RevenueQp& qp, const PriceVector& p,
                               const PriceVector& lower, const PriceVector& upper) {
  return pg_norm(p, qp.form().gradient(p), lower, upper);
}

PriceVector maximize_revenue_boxed(const RevenueQp& qp, const PriceVector& lower,
                                   const PriceVector& upper, const QpSolverConfig& cfg,
                                   std::uint64_t seed) {
  cfg.validate();
  check_box(qp, lower, upper);

  const PriceVector midpoint = 0.5 * (lower + upper);
  if (qp.strictly_concave()) return ascend(qp, midpoint, lower, upper, cfg).x;

  CounterRng rng(seed);
  LocalSolution best{midpoint, -std::numeric_limits<double>::infinity()};
  for (int r = 0; r < cfg.restarts; ++r) {
    PriceVector start;
    if (r == 0) {
      start = midpoint;
    } else if (r == 1) {
      start = lower;
    } else if (r == 2) {
      start = upper;
    } else {
      start.resize(qp.items());
      for (int j = 0; j < qp.items(); ++j) start(j) = rng.uniform(lower(j), upper(j));
    }
    LocalSolution local = ascend(qp, start, lower, upper, cfg);
    // Later restarts must beat the incumbent by more than value_tol.
    if (r == 0 || local.value > best.value + cfg.value_tol * (1.0 + std::abs(best.value)))
      best = std::move(local);
  }
  return best.x;
}

PriceVector maximize_revenue_boxed(const CoeffMatrix& theta, const PriceVector& lower,
                                   const PriceVector& upper, const QpSolverConfig& cfg,
                                   std::uint64_t seed) {
  return maximize_revenue_boxed(RevenueQp(theta), lower, upper, cfg, seed);
}

PriceVector maximize_revenue_boxed(const CoeffMatrix& theta, const PriceBox& box,
                                   const QpSolverConfig& cfg, std::uint64_t seed) {
  return maximize_revenue_boxed(theta, box.alpha(), box.beta(), cfg, seed);
}

namespace detail {

std::vector<std::vector<double>> grid_axes(const PriceVector& lower, const PriceVector& upper,
                                           double resolution) {
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(lower.size()));
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    auto& axis = axes[static_cast<std::size_t>(j)];
    const double width = upper(j) - lower(j);
    const auto steps = static_cast<long>(std::floor(width / resolution + 1e-9));
    for (long k = 0; k <= steps; ++k) axis.push_back(std::min(lower(j) + k * resolution, upper(j)));
    if (axis.back() < upper(j)) axis.push_back(upper(j));
  }
  return axes;
}

void check_grid_request(const CoeffMatrix& theta, const PriceVector& lower,
                        const PriceVector& upper, double resolution) {
  if (theta.items() > kGridOracleMaxItems)
    throw GuardRefusal("grid_oracle: m = " + std::to_string(theta.items()) +
                       " exceeds the exhaustive-search guard m <= " +
                       std::to_string(kGridOracleMaxItems));
  require(std::isfinite(resolution) && resolution > 0.0, "grid_oracle: resolution must be > 0");
  require(lower.size() == theta.items() && upper.size() == theta.items(),
          "grid_oracle: bound lengths differ from m");
  if ((lower.array() > upper.array()).any()) throw InfeasibleBox("grid_oracle: lower > upper");
}

}  // namespace detail

PriceVector grid_oracle(const CoeffMatrix& theta, const PriceVector& lower,
                        const PriceVector& upper, double resolution) {
  detail::check_grid_request(theta, lower, upper, resolution);
  const auto axes = detail::grid_axes(lower, upper, resolution);
  const QuadraticForm form = quadratic_coeffs(theta);
  const int m = theta.items();
  const int last = m - 1;
  const auto& inner = axes[static_cast<std::size_t>(last)];
  // Slabs are the points of axis 0; a one-item grid is a single slab.
  const auto outer = m == 1 ? 1L : static_cast<long>(axes[0].size());

  std::vector<double> slab_best(static_cast<std::size_t>(outer),
                                -std::numeric_limits<double>::infinity());
  std::vector<PriceVector> slab_arg(static_cast<std::size_t>(outer), PriceVector(m));

#pragma omp parallel for schedule(static)
  for (long i0 = 0; i0 < outer; ++i0) {
    std::vector<std::size_t> index(static_cast<std::size_t>(m), 0);
    PriceVector p(m);
    for (int j = 0; j < m; ++j) p(j) = axes[static_cast<std::size_t>(j)][0];
    if (m > 1) p(0) = axes[0][static_cast<std::size_t>(i0)];
    double best = -std::numeric_limits<double>::infinity();
    PriceVector arg = p;
    for (;;) {
      // With the leading coordinates fixed, revenue along the last axis is
      // constant + linear * x + curvature * x^2.
      double constant = 0.0, linear = form.b(last);
      for (int i = 0; i < last; ++i) {
        constant += form.b(i) * p(i);
        linear += 2.0 * form.A(i, last) * p(i);
        for (int k = 0; k < last; ++k) constant += form.A(i, k) * p(i) * p(k);
      }
      const double curvature = form.A(last, last);
      for (std::size_t k = 0; k < inner.size(); ++k) {
        const double x = inner[k];
        const double value = constant + (linear + curvature * x) * x;
        if (value > best) {
          best = value;
          p(last) = x;
          arg = p;
        }
      }
      // Odometer over axes 1..m-2, the last of them fastest.
      int j = last - 1;
      for (; j >= 1; --j) {
        auto& k = index[static_cast<std::size_t>(j)];
        const auto& axis = axes[static_cast<std::size_t>(j)];
        if (++k < axis.size()) {
          p(j) = axis[k];
          break;
        }
        k = 0;
        p(j) = axis[0];
      }
      if (j < 1) break;
    }
    slab_best[static_cast<std::size_t>(i0)] = best;
    slab_arg[static_cast<std::size_t>(i0)] = arg;
  }

  std::size_t winner = 0;
  for (std::size_t s = 1; s < slab_best.size(); ++s)
    if (slab_best[s] > slab_best[winner]) winner = s;
  return slab_arg[winner];
}

PriceVector grid_oracle(const CoeffMatrix& theta, const PriceBox& box, double resolution) {
  return grid_oracle(theta, box.alpha(), box.beta(), resolution);
}

}  // namespace pricebounds
