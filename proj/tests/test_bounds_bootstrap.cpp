#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "pricebounds/bounds_bootstrap.hpp"
#include "pricebounds/errors.hpp"
#include "test_support.hpp"

using namespace pricebounds;
using pricebounds::testing::noise_free_dataset;
using pricebounds::testing::noisy_trial;

namespace {

const QpSolverConfig kQp{};
const PriceEnvelope kEnv3 = PriceEnvelope::uniform(3, 0.5, 1.1);

}  // namespace

TEST(BootstrapBounds, ZeroKappaCollapsesToClippedMean) {
  const auto trial = noisy_trial(3, 200, 0.5, 4);
  const BootstrapReplicates reps = bootstrap_replicates(trial.data, kEnv3, 30, kQp, 9);
  const PriceBox box = bounds_from_replicates(reps, kEnv3, 0.0);
  for (int j = 0; j < 3; ++j) {
    const double clipped = std::clamp(reps.mean(j), 0.5, 1.1);
    EXPECT_EQ(box.alpha()(j), clipped);
    EXPECT_EQ(box.beta()(j), clipped);
  }
}

TEST(BootstrapBounds, NoiseFreeDataGivesNegligibleSpread) {
  const PriceDemandDataset data = noise_free_dataset(3, 100, 21);
  const BootstrapReplicates reps = bootstrap_replicates(data, kEnv3, 20, kQp, 2);
  EXPECT_LE(reps.sd.maxCoeff(), 1e-8);
  const PriceBox box = bounds_from_replicates(reps, kEnv3, 1.645);
  EXPECT_LE((box.beta() - box.alpha()).maxCoeff(), 2 * 1.645 * 1e-8);
}

TEST(BootstrapBounds, SampleSdUsesUnbiasedDivisor) {
  const auto trial = noisy_trial(2, 150, 0.6, 5);
  const PriceEnvelope env = PriceEnvelope::uniform(2, 0.5, 1.1);
  const BootstrapReplicates reps = bootstrap_replicates(trial.data, env, 12, kQp, 3);
  for (int j = 0; j < 2; ++j) {
    const Eigen::VectorXd col = reps.prices.col(j);
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / 11.0;
    EXPECT_NEAR(reps.mean(j), mean, 1e-15);
    EXPECT_NEAR(reps.sd(j), std::sqrt(var), 1e-14);
  }
}

TEST(BootstrapBounds, ReplicatesSolveOverFullEnvelope) {
  const auto trial = noisy_trial(3, 120, 0.75, 8);
  const BootstrapReplicates reps = bootstrap_replicates(trial.data, kEnv3, 25, kQp, 6);
  EXPECT_GE(reps.prices.minCoeff(), 0.5);
  EXPECT_LE(reps.prices.maxCoeff(), 1.1);
}

TEST(BootstrapBounds, AlwaysInsideEnvelopeAndOrdered) {
  for (int t = 0; t < 10; ++t) {
    const auto trial = noisy_trial(3, 60, 0.7, 100 + t);
    const BootstrapReplicates reps = bootstrap_replicates(trial.data, kEnv3, 10, kQp, t);
    for (double kappa : {0.0, 0.841, 1.645, 2.576, 50.0}) {
      const PriceBox box = bounds_from_replicates(reps, kEnv3, kappa);
      EXPECT_TRUE((box.alpha().array() >= 0.5).all());
      EXPECT_TRUE((box.beta().array() <= 1.1).all());
      EXPECT_TRUE((box.alpha().array() <= box.beta().array()).all());
    }
  }
}

TEST(BootstrapBounds, NestedInKappa) {
  const auto trial = noisy_trial(3, 300, 0.5, 14);
  const BootstrapReplicates reps = bootstrap_replicates(trial.data, kEnv3, 40, kQp, 1);
  const double kappas[] = {0.0, 0.841, 1.036, 1.282, 1.645, 1.960, 2.576,
                           std::numeric_limits<double>::infinity()};
  for (std::size_t k = 1; k < std::size(kappas); ++k) {
    const PriceBox small = bounds_from_replicates(reps, kEnv3, kappas[k - 1]);
    const PriceBox large = bounds_from_replicates(reps, kEnv3, kappas[k]);
    EXPECT_TRUE((large.alpha().array() <= small.alpha().array()).all());
    EXPECT_TRUE((large.beta().array() >= small.beta().array()).all());
  }
}

TEST(BootstrapBounds, InfiniteKappaIsFullEnvelope) {
  const auto trial = noisy_trial(3, 100, 0.5, 3);
  const BootstrapReplicates reps = bootstrap_replicates(trial.data, kEnv3, 5, kQp, 1);
  const PriceBox box = bounds_from_replicates(reps, kEnv3, std::numeric_limits<double>::infinity());
  EXPECT_TRUE((box.alpha().array() == 0.5).all());
  EXPECT_TRUE((box.beta().array() == 1.1).all());
}

TEST(BootstrapBounds, DeterministicBits) {
  const auto trial = noisy_trial(3, 200, 0.5, 77);
  const BootstrapConfig cfg;
  const PriceBox a = bootstrap_bounds(trial.data, kEnv3, cfg, kQp, 123);
  const PriceBox b = bootstrap_bounds(trial.data, kEnv3, cfg, kQp, 123);
  EXPECT_EQ(a.alpha(), b.alpha());
  EXPECT_EQ(a.beta(), b.beta());
}

TEST(BootstrapBounds, ReplicateCountStability) {
  const auto trial = noisy_trial(3, 300, 0.5, 31);
  const BootstrapReplicates small = bootstrap_replicates(trial.data, kEnv3, 100, kQp, 10);
  const BootstrapReplicates large = bootstrap_replicates(trial.data, kEnv3, 200, kQp, 20);
  for (int j = 0; j < 3; ++j) {
    const double se = std::sqrt(small.sd(j) * small.sd(j) / 100 + large.sd(j) * large.sd(j) / 200);
    EXPECT_LE(std::abs(small.mean(j) - large.mean(j)), 3 * se + 1e-12) << "item " << j;
  }
}

TEST(BootstrapBounds, RejectsSingleReplicate) {
  const auto trial = noisy_trial(2, 50, 0.5, 1);
  EXPECT_THROW(bootstrap_replicates(trial.data, PriceEnvelope::uniform(2, 0.5, 1.1), 1, kQp, 0),
               ContractViolation);
  BootstrapConfig cfg;
  cfg.n_bootstrap = 1;
  EXPECT_THROW(cfg.validate(), ContractViolation);
}

TEST(KappaForConfidence, Table) {
  EXPECT_EQ(kappa_for_confidence(0.6), 0.841);
  EXPECT_EQ(kappa_for_confidence(0.65), 0.935);
  EXPECT_EQ(kappa_for_confidence(0.7), 1.036);
  EXPECT_EQ(kappa_for_confidence(0.75), 1.150);
  EXPECT_EQ(kappa_for_confidence(0.8), 1.282);
  EXPECT_EQ(kappa_for_confidence(0.85), 1.440);
  EXPECT_EQ(kappa_for_confidence(0.9), 1.645);
  EXPECT_EQ(kappa_for_confidence(0.95), 1.960);
  EXPECT_EQ(kappa_for_confidence(0.99), 2.576);
  EXPECT_TRUE(std::isinf(kappa_for_confidence(1.0)));
  EXPECT_THROW(kappa_for_confidence(0.42), ContractViolation);
}
