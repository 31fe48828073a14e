#pragma once

#include <cstdint>

#include "pricebounds/core_model.hpp"

namespace pricebounds {

struct QpSolverConfig {
  int restarts = 8;
  int max_iters = 500;
  double step_tol = 1e-8;   // projected-gradient norm at convergence
  double value_tol = 1e-9;  // minimum accepted improvement per step

  void validate() const;
};

/// Revenue of one coefficient matrix prepared for repeated box-constrained
/// solves: quadratic form, concavity flag and a gradient Lipschitz bound.
class RevenueQp {
 public:
  explicit RevenueQp(const CoeffMatrix& theta);

  int items() const noexcept { return static_cast<int>(form_.b.size()); }
  const QuadraticForm& form() const noexcept { return form_; }
  bool strictly_concave() const noexcept { return concave_; }
  double lipschitz() const noexcept { return lipschitz_; }

  double value(const PriceVector& p) const { return form_.value(p); }

 private:
  QuadraticForm form_;
  bool concave_ = false;
  double lipschitz_ = 1.0;
};

/// Euclidean norm of clip(p + grad f(p)) - p; zero exactly at KKT points.
double projected_gradient_norm(const RevenueQp& qp, const PriceVector& p,
                               const PriceVector& lower, const PriceVector& upper);

/// Maximizes revenue over lower <= p <= upper.
///
/// Projected gradient ascent with Armijo backtracking, interleaved with
/// Newton steps on the free variables. A strictly concave problem has a
/// single maximizer and is solved from the box midpoint alone; otherwise
/// the solver runs `cfg.restarts` starts (midpoint, both corners, seeded
/// interior points) and keeps the first best. Throws InfeasibleBox if
/// lower > upper anywhere.
PriceVector maximize_revenue_boxed(const RevenueQp& qp, const PriceVector& lower,
                                   const PriceVector& upper, const QpSolverConfig& cfg,
                                   std::uint64_t seed);

PriceVector maximize_revenue_boxed(const CoeffMatrix& theta, const PriceVector& lower,
                                   const PriceVector& upper, const QpSolverConfig& cfg,
                                   std::uint64_t seed);

PriceVector maximize_revenue_boxed(const CoeffMatrix& theta, const PriceBox& box,
                                   const QpSolverConfig& cfg, std::uint64_t seed);

inline constexpr int kGridOracleMaxItems = 4;

/// Exhaustive search over the axis-aligned grid lower + k*resolution (plus
/// the upper endpoint) of every axis. Ties go to the first point in
/// lexicographic order. Refuses (GuardRefusal) above kGridOracleMaxItems.
/// Parallelized over the first axis; see reference::grid_oracle for the
/// serial version.
PriceVector grid_oracle(const CoeffMatrix& theta, const PriceVector& lower,
                        const PriceVector& upper, double resolution);

PriceVector grid_oracle(const CoeffMatrix& theta, const PriceBox& box, double resolution);

}  // namespace pricebounds
