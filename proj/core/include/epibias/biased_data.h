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

// Seeded synthetic classification data with a channel-collapsing attribute
// transform (the analogue of grayscale conversion) and two skew protocols:
// a sensitive-attribute skew and a minority skew.

#ifndef EPIBIAS_BIASED_DATA_H_
#define EPIBIAS_BIASED_DATA_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epibias/nnet.h"

namespace epibias {

struct SyntheticSpec {
  int n_classes = 10;
  int samples_per_class = 600;
  // Size of the held-out base from which both test sets are built.
  int test_per_class = 200;
  int channels = 3;
  int positions_per_channel = 8;
  double center_scale = 1.0;
  double noise_std = 1.0;
  std::uint64_t seed = 0;

  void Validate() const;
  int num_features() const { return channels * positions_per_channel; }
};

// Features are channel-major: index = channel * positions + position.
struct Sample {
  std::int64_t id = 0;
  int label = 0;
  int attribute = 0;  // 1 = transformed, 0 = untouched
  int subgroup = 0;
  std::vector<double> features;

  friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
  int num_classes = 0;
  int channels = 1;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  int num_features() const {
    return samples.empty() ? 0 : static_cast<int>(samples[0].features.size());
  }
  Matrix FeatureMatrix() const;
  std::vector<int> Labels() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class SkewScheme { kSensitive, kMinority };

std::string_view SkewSchemeName(SkewScheme scheme);
SkewScheme ParseSkewScheme(std::string_view name);

struct SkewPlan {
  SkewScheme scheme = SkewScheme::kSensitive;
  // Transformed fraction in the skewed classes (sensitive) or in every class
  // (minority).
  double skewed_fraction = 0.95;
  // Transformed fraction in the remaining classes (sensitive only).
  double other_fraction = 0.05;
  std::vector<int> skewed_classes;

  // First half of the classes skewed at `high`, the rest at `low`.
  static SkewPlan Sensitive(int n_classes, double high = 0.95,
                            double low = 0.05);
  static SkewPlan Minority(double fraction = 0.05);

  void Validate(int n_classes) const;
  double FractionFor(int label) const;
};

// Class centers come from the spec's seed; `stream` selects an independent
// noise stream so train and test bases share centers but not samples.
Dataset GenerateBase(const SyntheticSpec& spec, int per_class,
                     std::string_view stream);
inline Dataset GenerateBase(const SyntheticSpec& spec) {
  return GenerateBase(spec, spec.samples_per_class, "train");
}

// Replaces every channel at each position by the channel mean. Positions whose
// channels already agree are left untouched, which makes the map exactly
// idempotent.
std::vector<double> AttributeTransform(std::span<const double> features,
                                       int channels);
bool IsTransformFixedPoint(std::span<const double> features, int channels);

// Transforms exactly round(p_class * n_class) samples per class, chosen by a
// seeded shuffle. Samples already carrying the attribute are counted toward
// the quota and never transformed twice.
Dataset ApplySkew(Dataset data, const SkewPlan& plan, std::uint64_t seed);

// Transformed sample count per class.
std::vector<int> TransformedPerClass(const Dataset& data);

struct SplitRatio {
  int train = 5;
  int validation = 1;
};

// Stratified by (label, attribute). Sample ids are preserved. Strata whose
// size is not a multiple of the ratio granularity are rounded and reported in
// `warnings`.
std::pair<Dataset, Dataset> Split(const Dataset& data, SplitRatio ratio,
                                  std::uint64_t seed,
                                  std::vector<std::string>* warnings = nullptr);

// Untouched and fully transformed copies of one held-out base.
std::pair<Dataset, Dataset> MakeTestSets(const SyntheticSpec& spec);

struct GeneratedData {
  Dataset train;
  Dataset validation;
  Dataset test_colour;
  Dataset test_gray;
  std::vector<int> transformed_per_class;  // before the split
  std::vector<std::string> warnings;
};

// generate -> skew -> split, plus the two test sets. Ids are renumbered
// 0..n-1 within each output so they double as row indices.
GeneratedData GeneratePipeline(const SyntheticSpec& spec, const SkewPlan& plan,
                               SplitRatio ratio = {});

// A sample conflicts with its class's bias when its attribute differs from
// the majority attribute of its label.
std::vector<bool> BiasConflicting(const Dataset& data);

}  // namespace epibias

#endif  // EPIBIAS_BIASED_DATA_H_
