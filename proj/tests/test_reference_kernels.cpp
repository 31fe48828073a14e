#include <omp.h>

#include <gtest/gtest.h>

#include "pricebounds/bounds_bootstrap.hpp"
#include "pricebounds/bounds_cv.hpp"
#include "pricebounds/price_optimizer.hpp"
#include "pricebounds/reference.hpp"
#include "test_support.hpp"

using namespace pricebounds;
using pricebounds::testing::noisy_trial;
using pricebounds::testing::random_theta;

namespace {

class ThreadCount : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(GetParam());
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

}  // namespace

TEST_P(ThreadCount, BootstrapMatchesSerialReference) {
  const auto trial = noisy_trial(4, 150, 0.5, 8);
  const PriceEnvelope env = PriceEnvelope::uniform(4, 0.5, 1.1);
  const QpSolverConfig qp;
  const BootstrapReplicates par = bootstrap_replicates(trial.data, env, 24, qp, 5);
  const BootstrapReplicates ser = reference::bootstrap_replicates(trial.data, env, 24, qp, 5);
  EXPECT_EQ(par.prices, ser.prices);
  EXPECT_EQ(par.mean, ser.mean);
  EXPECT_EQ(par.sd, ser.sd);
}

TEST_P(ThreadCount, CvFoldsMatchSerialReference) {
  const auto trial = noisy_trial(3, 120, 0.5, 9);
  const CvRevenueEstimator est(trial.data, CvConfig{}, 6);
  const PriceVector lo = PriceVector::Constant(3, 0.6), hi = PriceVector::Constant(3, 1.0);
  EXPECT_EQ(est.fold_revenues(lo, hi), reference::cv_fold_revenues(est, lo, hi));
}

TEST_P(ThreadCount, GridOracleMatchesSerialReference) {
  for (int m = 1; m <= 3; ++m) {
    const CoeffMatrix theta = random_theta(m, 70 + m);
    const PriceVector lo = PriceVector::Constant(m, 0.5), hi = PriceVector::Constant(m, 1.1);
    const double res = m == 3 ? 0.02 : 0.001;
    // The two kernels round differently, so compare the revenue they reach.
    const PriceVector par = grid_oracle(theta, lo, hi, res);
    const PriceVector ser = reference::grid_oracle(theta, lo, hi, res);
    EXPECT_NEAR(eval_revenue(theta, par), eval_revenue(theta, ser), 1e-12);
    EXPECT_LE((par - ser).cwiseAbs().maxCoeff(), res + 1e-12);
  }
}

INSTANTIATE_TEST_SUITE_P(Threads, ThreadCount, ::testing::Values(1, 2, 4));
