#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

namespace pricebounds {

struct NmConfig {
  int max_evals = 0;  // 0 means 400 * dimension
  double x_tol = 1e-4;
  double f_tol = 1e-6;
  double init_step = 0.1;  // initial edge, as a fraction of the box width
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;

  void validate() const;
  int eval_budget(int dimension) const { return max_evals > 0 ? max_evals : 400 * dimension; }
};

struct NmResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

using NmObjective = std::function<double(const Eigen::VectorXd&)>;

/// Called after every objective evaluation with the evaluation count and the
/// best value seen so far.
using NmTrace = std::function<void(int evaluations, double best_value)>;

/// Maximizes `objective` over the box [lower, upper] with the Nelder-Mead
/// simplex method. Every candidate is clipped into the box before it is
/// evaluated; non-finite objective values rank as -infinity. Stops when both
/// the simplex extent (infinity norm around the best vertex) is within x_tol
/// and the value spread is within f_tol, or when the evaluation budget runs
/// out.
NmResult nm_maximize(const NmObjective& objective, const Eigen::VectorXd& lower,
                     const Eigen::VectorXd& upper, const Eigen::VectorXd& start,
                     const NmConfig& cfg, std::uint64_t seed, const NmTrace& trace = {});

}  // namespace pricebounds
