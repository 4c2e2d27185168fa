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

#include "epibias/weighted_loss.h"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "epibias/errors.h"
#include "test_support.h"

namespace epibias {
namespace {

TEST(KappaTest, Validation) {
  EXPECT_THROW(Kappa{-0.5}, UsageError);
  EXPECT_THROW(Kappa{INFINITY}, UsageError);
  EXPECT_THROW(Kappa{NAN}, UsageError);
  EXPECT_EQ(Kappa(2.0).value(), 2.0);
}

TEST(KappaTest, DefaultGrid) {
  EXPECT_EQ(kDefaultKappaGrid,
            (std::vector<double>{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}));
}

TEST(UncertaintyWeightTest, Examples) {
  for (double k : kDefaultKappaGrid) EXPECT_EQ(UncertaintyWeight(0.0, Kappa(k)), 1.0);
  for (double s : {0.0, 0.1, 0.37, 0.5}) EXPECT_EQ(UncertaintyWeight(s, Kappa(0.0)), 1.0);
  EXPECT_DOUBLE_EQ(UncertaintyWeight(0.5, Kappa(2.0)), 2.25);
  EXPECT_DOUBLE_EQ(UncertaintyWeight(0.2, Kappa(1.0)), 1.2);
}

TEST(UncertaintyWeightTest, RejectsSigmaOutsideRange) {
  EXPECT_THROW(UncertaintyWeight(-0.01, Kappa(1.0)), UsageError);
  EXPECT_THROW(UncertaintyWeight(0.51, Kappa(1.0)), UsageError);
  EXPECT_THROW(UncertaintyWeight(NAN, Kappa(1.0)), UsageError);
}

TEST(UncertaintyWeightTest, PropertyMonotoneAndAtLeastOne) {
  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const double a = testing::UniformReal(rng, 0.0, 0.5);
    const double b = testing::UniformReal(rng, 0.0, 0.5);
    const Kappa k(testing::UniformReal(rng, 0.0, 16.0));
    const double wa = UncertaintyWeight(a, k), wb = UncertaintyWeight(b, k);
    EXPECT_GE(wa, 1.0);
    if (a <= b) EXPECT_LE(wa, wb);
    else EXPECT_GE(wa, wb);
  }
}

TEST(WeightedBatchLossTest, Examples) {
  const std::vector<double> l = {1.0, 3.0};
  EXPECT_DOUBLE_EQ(WeightedBatchLoss(l, std::vector<double>{1.0, 2.0}), 3.5);
  EXPECT_DOUBLE_EQ(WeightedBatchLoss(l, std::vector<double>{1.0, 1.0}), 2.0);
  EXPECT_THROW(WeightedBatchLoss(l, std::vector<double>{1.0}), UsageError);
  EXPECT_THROW(WeightedBatchLoss({}, {}), UsageError);
  EXPECT_THROW(WeightedBatchLoss(l, std::vector<double>{1.0, -1.0}), UsageError);
}

TEST(WeightedBatchLossTest, MatchesAccumulationOracle) {
  Rng rng(2);
  std::vector<double> l, w;
  for (int i = 0; i < 100; ++i) {
    l.push_back(testing::UniformReal(rng, 0.0, 5.0));
    w.push_back(testing::UniformReal(rng, 1.0, 3.0));
  }
  long double acc = 0.0L;
  for (int i = 0; i < 100; ++i) acc += static_cast<long double>(l[i]) * w[i];
  EXPECT_NEAR(WeightedBatchLoss(l, w), static_cast<double>(acc / 100), 1e-12);
}

TEST(WeightedBatchLossTest, PropertyIncreasingInKappa) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = testing::UniformInt(rng, 1, 20);
    std::vector<double> losses, sigmas;
    for (int i = 0; i < n; ++i) {
      losses.push_back(testing::UniformReal(rng, 0.01, 4.0));
      sigmas.push_back(testing::UniformInt(rng, 0, 1) ? testing::UniformReal(rng, 0.0, 0.5) : 0.0);
    }
    sigmas[0] = testing::UniformReal(rng, 0.01, 0.5);
    auto loss_at = [&](double kappa, const std::vector<double>& s) {
      std::vector<double> w;
      for (double v : s) w.push_back(UncertaintyWeight(v, Kappa(kappa)));
      return WeightedBatchLoss(losses, w);
    };
    double prev = loss_at(0.0, sigmas);
    for (double k : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
      const double cur = loss_at(k, sigmas);
      EXPECT_GT(cur, prev);
      prev = cur;
    }
    const std::vector<double> zeros(n, 0.0);
    for (double k : kDefaultKappaGrid) EXPECT_EQ(loss_at(k, zeros), loss_at(0.0, zeros));
  }
}

}  // namespace
}  // namespace epibias
