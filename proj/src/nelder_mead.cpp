#include "pricebounds/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "pricebounds/errors.hpp"
#include "pricebounds/rng.hpp"

namespace pricebounds {

void NmConfig::validate() const {
  require(max_evals >= 0, "NmConfig: max_evals must be non-negative (0 = default)");
  require(x_tol > 0.0 && f_tol > 0.0, "NmConfig: tolerances must be positive");
  require(init_step > 0.0, "NmConfig: init_step must be positive");
  require(reflection > 0.0 && expansion > 0.0 && contraction > 0.0 && shrink > 0.0,
          "NmConfig: coefficients must be positive");
  require(expansion > reflection, "NmConfig: expansion must exceed reflection");
  require(contraction < 1.0 && shrink < 1.0, "NmConfig: contraction and shrink must be < 1");
}

namespace {

constexpr double kDegeneracyThreshold = 1e-10;
constexpr double kJitter = 0.01;
constexpr int kMaxRepairs = 10;

struct Vertex {
  Eigen::VectorXd x;
  double f;
};

bool degenerate(const std::vector<Vertex>& simplex, const Eigen::VectorXd& width) {
  const auto d = static_cast<Eigen::Index>(simplex.size()) - 1;
  std::vector<Eigen::Index> live;
  for (Eigen::Index k = 0; k < d; ++k)
    if (width(k) > 0.0) live.push_back(k);
  if (live.empty()) return false;
  Eigen::MatrixXd edges(d, static_cast<Eigen::Index>(live.size()));
  for (Eigen::Index v = 0; v < d; ++v)
    for (std::size_t c = 0; c < live.size(); ++c)
      edges(v, static_cast<Eigen::Index>(c)) =
          (simplex[static_cast<std::size_t>(v) + 1].x(live[c]) - simplex[0].x(live[c])) /
          width(live[c]);
  if (edges.cwiseAbs().maxCoeff() == 0.0) return true;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(edges);
  lu.setThreshold(kDegeneracyThreshold);
  return lu.rank() < static_cast<Eigen::Index>(live.size());
}

}  // namespace

NmResult nm_maximize(const NmObjective& objective, const Eigen::VectorXd& lower,
                     const Eigen::VectorXd& upper, const Eigen::VectorXd& start,
                     const NmConfig& cfg, std::uint64_t seed, const NmTrace& trace) {
  cfg.validate();
  const auto d = start.size();
  require(d >= 1, "nm_maximize: empty start point");
  require(lower.size() == d && upper.size() == d, "nm_maximize: bound lengths differ");
  require(lower.allFinite() && upper.allFinite() && start.allFinite(),
          "nm_maximize: non-finite bound or start");
  require((lower.array() <= start.array()).all() && (start.array() <= upper.array()).all(),
          "nm_maximize: start lies outside the box");

  const Eigen::VectorXd width = upper - lower;
  const int budget = cfg.eval_budget(static_cast<int>(d));
  CounterRng rng(seed);

  NmResult result;
  result.value = -std::numeric_limits<double>::infinity();
  result.x = start;

  auto clip = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x.cwiseMax(lower).cwiseMin(upper);
  };
  auto evaluate = [&](const Eigen::VectorXd& x) -> std::optional<double> {
    if (result.evaluations >= budget) return std::nullopt;
    double f = objective(x);
    if (!std::isfinite(f)) f = -std::numeric_limits<double>::infinity();
    ++result.evaluations;
    if (result.evaluations == 1 || f > result.value) {
      result.value = f;
      result.x = x;
    }
    if (trace) trace(result.evaluations, result.value);
    return f;
  };

  std::vector<Vertex> simplex;
  simplex.reserve(static_cast<std::size_t>(d) + 1);
  {
    auto f0 = evaluate(start);
    if (!f0) return result;
    simplex.push_back({start, *f0});
  }
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd x = start;
    const double step = cfg.init_step * width(k);
    x(k) = start(k) + step <= upper(k) ? start(k) + step : start(k) - step;
    x = clip(x);
    auto f = evaluate(x);
    if (!f) return result;
    simplex.push_back({std::move(x), *f});
  }

  const auto n_vertices = simplex.size();
  int repairs = 0;
  auto by_value = [](const Vertex& a, const Vertex& b) { return a.f > b.f; };

  for (;;) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);

    double extent = 0.0;
    double spread = 0.0;
    for (std::size_t v = 1; v < n_vertices; ++v) {
      extent = std::max(extent, (simplex[v].x - simplex[0].x).lpNorm<Eigen::Infinity>());
      spread = std::max(spread, std::abs(simplex[0].f - simplex[v].f));
    }
    if (extent <= cfg.x_tol && spread <= cfg.f_tol) {
      result.converged = true;
      break;
    }

    if (repairs < kMaxRepairs && degenerate(simplex, width)) {
      ++repairs;
      bool exhausted = false;
      for (std::size_t v = 1; v < n_vertices && !exhausted; ++v) {
        Eigen::VectorXd x = simplex[v].x;
        for (Eigen::Index k = 0; k < d; ++k) x(k) += rng.uniform(-kJitter, kJitter) * width(k);
        x = clip(x);
        auto f = evaluate(x);
        if (!f) {
          exhausted = true;
        } else {
          simplex[v] = {std::move(x), *f};
        }
      }
      if (exhausted) break;
      continue;
    }

    ++result.iterations;
    Vertex& worst = simplex.back();
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (std::size_t v = 0; v + 1 < n_vertices; ++v) centroid += simplex[v].x;
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd xr = clip(centroid + cfg.reflection * (centroid - worst.x));
    auto fr = evaluate(xr);
    if (!fr) break;

    if (*fr > simplex.front().f) {
      const Eigen::VectorXd xe = clip(centroid + cfg.expansion * (xr - centroid));
      auto fe = evaluate(xe);
      if (!fe) break;
      if (*fe > *fr) {
        worst = {xe, *fe};
      } else {
        worst = {xr, *fr};
      }
      continue;
    }
    if (*fr > simplex[n_vertices - 2].f) {
      worst = {xr, *fr};
      continue;
    }

    bool contracted = false;
    if (*fr > worst.f) {
      const Eigen::VectorXd xc = clip(centroid + cfg.contraction * (xr - centroid));
      auto fc = evaluate(xc);
      if (!fc) break;
      if (*fc >= *fr) {
        worst = {xc, *fc};
        contracted = true;
      }
    } else {
      const Eigen::VectorXd xc = clip(centroid + cfg.contraction * (worst.x - centroid));
      auto fc = evaluate(xc);
      if (!fc) break;
      if (*fc > worst.f) {
        worst = {xc, *fc};
        contracted = true;
      }
    }
    if (contracted) continue;

    bool exhausted = false;
    for (std::size_t v = 1; v < n_vertices && !exhausted; ++v) {
      Eigen::VectorXd x = clip(simplex[0].x + cfg.shrink * (simplex[v].x - simplex[0].x));
      auto f = evaluate(x);
      if (!f) {
        exhausted = true;
      } else {
        simplex[v] = {std::move(x), *f};
      }
    }
    if (exhausted) break;
  }
  return result;
}

}  // namespace pricebounds
