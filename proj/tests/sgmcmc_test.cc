/*
 * Copyright 2026 The epibias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "epibias/sgmcmc.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "conjugate_gaussian.h"
#include "epibias/errors.h"
#include "test_support.h"

namespace epibias {
namespace {

TEST(StepScheduleTest, ItersPerCycleIsCeiling) {
  EXPECT_EQ((StepSchedule{1.0, 100, 4}).iters_per_cycle(), 25);
  EXPECT_EQ((StepSchedule{1.0, 101, 4}).iters_per_cycle(), 26);
  EXPECT_EQ((StepSchedule{1.0, 7, 7}).iters_per_cycle(), 1);
}

TEST(StepScheduleTest, Validation) {
  EXPECT_THROW((StepSchedule{0.0, 10, 1}).Validate(), ConfigError);
  EXPECT_THROW((StepSchedule{1.0, 0, 1}).Validate(), ConfigError);
  EXPECT_THROW((StepSchedule{1.0, 10, 11}).Validate(), ConfigError);
  EXPECT_THROW((StepSchedule{1.0, 10, 0}).Validate(), ConfigError);
  EXPECT_NO_THROW((StepSchedule{1.0, 10, 10}).Validate());
}

TEST(StepsizeTest, CycleStartMidAndEnd) {
  const StepSchedule s{0.3, 400, 4};
  for (int c = 0; c < 4; ++c) {
    EXPECT_NEAR(Stepsize(c * 100 + 1, s), 0.3, 1e-12);
    EXPECT_NEAR(Stepsize(c * 100 + 51, s), 0.15, 1e-12);
    const double end = 0.15 * (std::cos(0.99 * std::numbers::pi) + 1.0);
    EXPECT_NEAR(Stepsize(c * 100 + 100, s), end, 1e-12);
    EXPECT_LT(Stepsize(c * 100 + 100, s), 1e-3 * 0.3);
  }
  // alpha0/2 (cos(0.99 pi) + 1) = 2.467e-4 alpha0 to four figures.
  EXPECT_NEAR(Stepsize(100, s) / 0.3, 2.467e-4, 5e-8);
}

TEST(StepsizeTest, OutOfRangeIsUsageError) {
  const StepSchedule s{1.0, 10, 2};
  EXPECT_THROW(Stepsize(0, s), UsageError);
  EXPECT_THROW(Stepsize(11, s), UsageError);
  EXPECT_NO_THROW(Stepsize(10, s));
}

TEST(StepsizeTest, PropertyDecreasingWithinCycleAndPeriodic) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::int64_t cycles = testing::UniformInt(rng, 1, 6);
    const std::int64_t k = testing::UniformInt(rng, 2, 60);
    const StepSchedule s{testing::UniformReal(rng, 1e-6, 1.0), cycles * k,
                         cycles};
    for (std::int64_t i = 1; i <= s.total_iters; ++i) {
      const double a = Stepsize(i, s);
      EXPECT_GT(a, 0.0);
      EXPECT_LE(a, s.alpha0);
      if ((i - 1) % k != 0) EXPECT_LT(a, Stepsize(i - 1, s));
      if (i > k) EXPECT_EQ(a, Stepsize(i - k, s));
    }
  }
}

TEST(PhaseTest, Rules) {
  EXPECT_EQ(PhaseOf(65, 70, 5), Phase::kSampling);
  EXPECT_EQ(PhaseOf(64, 70, 5), Phase::kExploration);
  EXPECT_EQ(PhaseOf(69, 70, 5), Phase::kSampling);
  EXPECT_EQ(PhaseOf(0, 70, 5), Phase::kExploration);
  for (int e = 0; e < 8; ++e) EXPECT_EQ(PhaseOf(e, 8, 8), Phase::kSampling);
  EXPECT_THROW(PhaseOf(0, 5, 6), UsageError);
  EXPECT_THROW(PhaseOf(5, 5, 1), UsageError);
  EXPECT_EQ(PhaseName(Phase::kSampling), "sampling");
  EXPECT_EQ(PhaseName(Phase::kExploration), "exploration");
}

TEST(NoiseConfigTest, Validation) {
  EXPECT_THROW((NoiseConfig{-1.0, 0.0}).Validate(), ConfigError);
  EXPECT_THROW((NoiseConfig{1.0, 1.0}).Validate(), ConfigError);
  EXPECT_THROW((NoiseConfig{1.0, -0.1}).Validate(), ConfigError);
  EXPECT_NO_THROW((NoiseConfig{0.0, 0.9}).Validate());
}

TEST(SgldStepTest, ZeroGradNoNoiseLeavesParams) {
  ParamVector p(std::vector<double>{1.0, -2.0});
  const ParamVector before = p;
  SgldState state;
  Rng rng(1);
  SgldStep(p, ParamVector(2), 0.1, {0.0, 0.0}, state, rng);
  EXPECT_EQ(p, before);
}

TEST(SgldStepTest, NoiseFreeIsPlainSgd) {
  ParamVector p(std::vector<double>{1.0, -2.0, 0.5});
  const ParamVector g({0.3, -0.1, 2.0});
  SgldState state;
  Rng rng(1);
  const Rng untouched = rng;
  SgldStep(p, g, 0.01, {0.0, 0.0}, state, rng);
  EXPECT_EQ(p[0], 1.0 - 0.01 * 0.3);
  EXPECT_EQ(p[1], -2.0 - 0.01 * -0.1);
  EXPECT_EQ(p[2], 0.5 - 0.01 * 2.0);
  EXPECT_EQ(rng, untouched);  // temperature 0 draws nothing
}

TEST(SgldStepTest, HeavyBallMomentum) {
  ParamVector p(std::vector<double>{0.0});
  SgldState state;
  Rng rng(1);
  const NoiseConfig n{0.0, 0.9};
  SgldStep(p, ParamVector(std::vector<double>{1.0}), 0.1, n, state, rng);
  EXPECT_DOUBLE_EQ(p[0], -0.1);
  SgldStep(p, ParamVector(std::vector<double>{1.0}), 0.1, n, state, rng);
  EXPECT_DOUBLE_EQ(state.velocity[0], 1.9);
  EXPECT_DOUBLE_EQ(p[0], -0.1 - 0.19);
}

TEST(SgldStepTest, NonFiniteGradientAbortsUntouched) {
  ParamVector p(std::vector<double>{1.0, 2.0});
  const ParamVector before = p;
  SgldState state;
  Rng rng(1);
  EXPECT_THROW(SgldStep(p, ParamVector(std::vector<double>{0.0, INFINITY}), 0.1, {1.0, 0.5},
                        state, rng),
               TrainingError);
  EXPECT_EQ(p, before);
}

TEST(SgldStepTest, SameSeedSameTrajectory) {
  auto run = [] {
    ParamVector p(std::vector<double>{0.0, 0.0, 0.0});
    SgldState state;
    Rng rng = MakeStream(42, streams::kNoise);
    for (int i = 0; i < 100; ++i) {
      SgldStep(p, ParamVector(std::vector<double>{p[0], -p[1], 1.0}), 0.01, {1.0, 0.9}, state, rng);
    }
    return p;
  };
  EXPECT_EQ(run(), run());
}

TEST(SgldStepTest, InjectedNoiseVarianceIsTwoAlpha) {
  constexpr double kAlpha = 0.01;
  constexpr int kSteps = 100000;
  ParamVector p(1);
  SgldState state;
  Rng rng(123);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < kSteps; ++i) {
    const double before = p[0];
    SgldStep(p, ParamVector(1), kAlpha, {1.0, 0.0}, state, rng);
    const double inc = p[0] - before;
    sum += inc;
    sum_sq += inc * inc;
  }
  const double mean = sum / kSteps;
  const double var = sum_sq / kSteps - mean * mean;
  EXPECT_NEAR(var, 2.0 * kAlpha, 0.05 * 2.0 * kAlpha);
}

TEST(SgldStepTest, TemperatureScalesVariance) {
  ParamVector p(1);
  SgldState state;
  Rng rng(7);
  double sum_sq = 0.0;
  for (int i = 0; i < 50000; ++i) {
    const double before = p[0];
    SgldStep(p, ParamVector(1), 0.01, {4.0, 0.0}, state, rng);
    sum_sq += (p[0] - before) * (p[0] - before);
  }
  EXPECT_NEAR(sum_sq / 50000, 0.08, 0.05 * 0.08);
}

TEST(ConjugateGaussianTest, RecoversPosteriorMoments) {
  const testing::ConjugateRun run = testing::SampleConjugateGaussian(2026);
  EXPECT_EQ(run.draws, 5000);
  EXPECT_LT(std::abs(run.sample_mean - run.posterior_mean),
            0.05 * std::abs(run.posterior_mean));
  EXPECT_LT(std::abs(run.sample_var - run.posterior_var),
            0.05 * run.posterior_var);
}

}  // namespace
}  // namespace epibias
