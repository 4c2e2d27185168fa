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

#include "epibias/biased_data.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "epibias/errors.h"
#include "test_support.h"

namespace epibias {
namespace {

SyntheticSpec SmallSpec(int per_class = 100, std::uint64_t seed = 1) {
  SyntheticSpec s;
  s.samples_per_class = per_class;
  s.test_per_class = 20;
  s.positions_per_channel = 4;
  s.seed = seed;
  return s;
}

TEST(SyntheticSpecTest, Validation) {
  SyntheticSpec s;
  EXPECT_NO_THROW(s.Validate());
  s.channels = 1;
  EXPECT_THROW(s.Validate(), ConfigError);
  s = {};
  s.samples_per_class = 0;
  EXPECT_THROW(s.Validate(), ConfigError);
  s = {};
  s.noise_std = -1;
  EXPECT_THROW(s.Validate(), ConfigError);
  s = {};
  s.n_classes = 1;
  EXPECT_THROW(s.Validate(), ConfigError);
}

TEST(GenerateBaseTest, SizesAndBalance) {
  SyntheticSpec s;
  const Dataset d = GenerateBase(s);
  EXPECT_EQ(d.size(), 6000u);
  std::map<int, int> per_label;
  for (const Sample& x : d.samples) {
    ++per_label[x.label];
    EXPECT_EQ(x.attribute, 0);
    EXPECT_EQ(x.features.size(), 24u);
  }
  for (int c = 0; c < 10; ++c) EXPECT_EQ(per_label[c], 600);
}

TEST(GenerateBaseTest, ZeroNoiseGivesClassCenters) {
  SyntheticSpec s = SmallSpec(5);
  s.noise_std = 0.0;
  const Dataset d = GenerateBase(s);
  std::map<int, std::vector<double>> center;
  for (const Sample& x : d.samples) {
    auto [it, inserted] = center.emplace(x.label, x.features);
    if (!inserted) EXPECT_EQ(x.features, it->second);
  }
  EXPECT_EQ(center.size(), 10u);
}

TEST(GenerateBaseTest, DeterministicPerSeed) {
  EXPECT_EQ(GenerateBase(SmallSpec(50, 3)), GenerateBase(SmallSpec(50, 3)));
  EXPECT_NE(GenerateBase(SmallSpec(50, 3)), GenerateBase(SmallSpec(50, 4)));
}

TEST(GenerateBaseTest, UntouchedSamplesAreNotFixedPoints) {
  const Dataset d = GenerateBase(SmallSpec());
  for (const Sample& x : d.samples) {
    EXPECT_FALSE(IsTransformFixedPoint(x.features, d.channels));
  }
}

TEST(AttributeTransformTest, Examples) {
  // Channel-major: channel 0 = {1}, channel 1 = {2}, channel 2 = {3}.
  EXPECT_EQ(AttributeTransform(std::vector<double>{1, 2, 3}, 3),
            (std::vector<double>{2, 2, 2}));
  const std::vector<double> equal = {0.5, -1, 0.5, -1};
  EXPECT_EQ(AttributeTransform(equal, 2), equal);
  EXPECT_THROW(AttributeTransform(std::vector<double>{1, 2, 3}, 2), UsageError);
}

TEST(AttributeTransformTest, PropertyIdempotentExactly) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int channels = testing::UniformInt(rng, 2, 5);
    const int positions = testing::UniformInt(rng, 1, 10);
    std::vector<double> x(channels * positions);
    for (double& v : x) v = testing::UniformReal(rng, -10, 10);
    const auto once = AttributeTransform(x, channels);
    EXPECT_EQ(AttributeTransform(once, channels), once);
    EXPECT_TRUE(IsTransformFixedPoint(once, channels));
  }
}

TEST(SkewPlanTest, Factories) {
  const SkewPlan s = SkewPlan::Sensitive(10);
  EXPECT_EQ(s.skewed_classes, (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(s.FractionFor(2), 0.95);
  EXPECT_EQ(s.FractionFor(7), 0.05);
  const SkewPlan m = SkewPlan::Minority();
  for (int c = 0; c < 10; ++c) EXPECT_EQ(m.FractionFor(c), 0.05);
  EXPECT_THROW(SkewPlan::Sensitive(10, 1.5).Validate(10), ConfigError);
  SkewPlan bad = s;
  bad.skewed_classes = {0, 1};
  EXPECT_THROW(bad.Validate(10), ConfigError);
  EXPECT_EQ(ParseSkewScheme("minority"), SkewScheme::kMinority);
  EXPECT_THROW(ParseSkewScheme("other"), ConfigError);
}

TEST(ApplySkewTest, SensitiveQuotas) {
  SyntheticSpec s = SmallSpec(1000);
  const Dataset d = ApplySkew(GenerateBase(s), SkewPlan::Sensitive(10), 9);
  const auto counts = TransformedPerClass(d);
  for (int c = 0; c < 10; ++c) EXPECT_EQ(counts[c], c < 5 ? 950 : 50);
  long total = 0;
  for (int n : counts) total += n;
  EXPECT_EQ(total, 5000);
}

TEST(ApplySkewTest, MinorityQuotas) {
  const Dataset d = ApplySkew(GenerateBase(SmallSpec(1000)), SkewPlan::Minority(), 9);
  for (int n : TransformedPerClass(d)) EXPECT_EQ(n, 50);
}

TEST(ApplySkewTest, HalfQuotaIsIndependentOfClass) {
  const Dataset d =
      ApplySkew(GenerateBase(SmallSpec(1000)), SkewPlan::Minority(0.5), 9);
  // Chi-square statistic of the class x attribute contingency table.
  std::vector<std::array<double, 2>> obs(10, {0, 0});
  for (const Sample& x : d.samples) obs[x.label][x.attribute] += 1;
  const double n = static_cast<double>(d.size());
  double col[2] = {0, 0};
  for (const auto& row : obs) {
    col[0] += row[0];
    col[1] += row[1];
  }
  double chi2 = 0;
  for (const auto& row : obs) {
    for (int a = 0; a < 2; ++a) {
      const double e = (row[0] + row[1]) * col[a] / n;
      chi2 += (row[a] - e) * (row[a] - e) / e;
    }
  }
  EXPECT_EQ(chi2, 0.0);
}

TEST(ApplySkewTest, AttributeMatchesFixedPointAndIsNotReapplied) {
  const Dataset d = ApplySkew(GenerateBase(SmallSpec()), SkewPlan::Sensitive(10), 2);
  for (const Sample& x : d.samples) {
    EXPECT_EQ(x.attribute == 1, IsTransformFixedPoint(x.features, d.channels));
  }
  EXPECT_EQ(ApplySkew(d, SkewPlan::Sensitive(10), 2), d);
  EXPECT_EQ(TransformedPerClass(ApplySkew(d, SkewPlan::Sensitive(10), 3)),
            TransformedPerClass(d));
}

TEST(ApplySkewTest, PropertyQuotaExactForEverySeed) {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    SyntheticSpec s = SmallSpec(testing::UniformInt(rng, 1, 60), rng());
    s.n_classes = 2 * testing::UniformInt(rng, 1, 5);
    const double hi = testing::UniformReal(rng, 0, 1);
    const double lo = testing::UniformReal(rng, 0, 1);
    const SkewPlan plan = SkewPlan::Sensitive(s.n_classes, hi, lo);
    const auto counts = TransformedPerClass(ApplySkew(GenerateBase(s), plan, rng()));
    for (int c = 0; c < s.n_classes; ++c) {
      EXPECT_EQ(counts[c], std::lround(plan.FractionFor(c) * s.samples_per_class));
    }
  }
}

TEST(SplitTest, FiveToOne) {
  SyntheticSpec s;
  const Dataset d = ApplySkew(GenerateBase(s), SkewPlan::Sensitive(10), 1);
  const auto [train, val] = Split(d, {5, 1}, 4);
  EXPECT_EQ(train.size(), 5000u);
  EXPECT_EQ(val.size(), 1000u);
  // Skew proportions survive in both parts.
  const auto tc = TransformedPerClass(train);
  const auto vc = TransformedPerClass(val);
  for (int c = 0; c < 10; ++c) {
    EXPECT_EQ(tc[c], c < 5 ? 475 : 25);
    EXPECT_EQ(vc[c], c < 5 ? 95 : 5);
  }
}

TEST(SplitTest, OneToZeroLeavesValidationEmpty) {
  const Dataset d = GenerateBase(SmallSpec(10));
  const auto [train, val] = Split(d, {1, 0}, 4);
  EXPECT_EQ(train.size(), d.size());
  EXPECT_TRUE(val.samples.empty());
}

TEST(SplitTest, PropertyPartition) {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset d = ApplySkew(GenerateBase(SmallSpec(testing::UniformInt(rng, 1, 40), rng())),
                                SkewPlan::Sensitive(10), rng());
    const SplitRatio ratio{testing::UniformInt(rng, 1, 6), testing::UniformInt(rng, 0, 3)};
    std::vector<std::string> warnings;
    const auto [train, val] = Split(d, ratio, rng(), &warnings);
    std::multiset<std::int64_t> ids;
    for (const Sample& x : train.samples) ids.insert(x.id);
    for (const Sample& x : val.samples) ids.insert(x.id);
    std::multiset<std::int64_t> expected;
    for (const Sample& x : d.samples) expected.insert(x.id);
    EXPECT_EQ(ids, expected);
    EXPECT_EQ(std::set<std::int64_t>(ids.begin(), ids.end()).size(), d.size());
  }
}

TEST(SplitTest, SmallStrataWarn) {
  const Dataset d = GenerateBase(SmallSpec(4));
  std::vector<std::string> warnings;
  Split(d, {5, 1}, 1, &warnings);
  EXPECT_FALSE(warnings.empty());
}

TEST(MakeTestSetsTest, ColourAndGrayCopies) {
  const SyntheticSpec s = SmallSpec();
  const auto [colour, gray] = MakeTestSets(s);
  ASSERT_EQ(colour.size(), 200u);
  ASSERT_EQ(gray.size(), colour.size());
  for (std::size_t i = 0; i < colour.size(); ++i) {
    EXPECT_EQ(colour.samples[i].attribute, 0);
    EXPECT_EQ(gray.samples[i].attribute, 1);
    EXPECT_EQ(gray.samples[i].label, colour.samples[i].label);
    EXPECT_EQ(gray.samples[i].features,
              AttributeTransform(colour.samples[i].features, s.channels));
  }
}

TEST(GeneratePipelineTest, PureFunctionWithRenumberedIds) {
  const SyntheticSpec s = SmallSpec(60, 11);
  const GeneratedData a = GeneratePipeline(s, SkewPlan::Minority());
  const GeneratedData b = GeneratePipeline(s, SkewPlan::Minority());
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.validation, b.validation);
  EXPECT_EQ(a.test_colour, b.test_colour);
  EXPECT_EQ(a.test_gray, b.test_gray);
  for (const Dataset* d : {&a.train, &a.validation, &a.test_colour}) {
    for (std::size_t i = 0; i < d->size(); ++i) {
      EXPECT_EQ(d->samples[i].id, static_cast<std::int64_t>(i));
    }
  }
  EXPECT_EQ(a.transformed_per_class, std::vector<int>(10, 3));
  // Train and test draw from the same centers but different noise.
  EXPECT_NE(a.train.samples[0].features, a.test_colour.samples[0].features);
}

TEST(BiasConflictingTest, MinorityAttributeOfEachClass) {
  Dataset d;
  d.num_classes = 2;
  for (int a : {1, 1, 0}) d.samples.push_back({0, 0, a, 0, {}});
  for (int a : {0, 1}) d.samples.push_back({0, 1, a, 0, {}});
  EXPECT_EQ(BiasConflicting(d),
            (std::vector<bool>{false, false, true, false, false}));
}

}  // namespace
}  // namespace epibias
