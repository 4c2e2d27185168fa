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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "epibias/errors.h"
#include "epibias/rng.h"

namespace epibias {
namespace {

std::string StreamName(std::string_view a, std::string_view b) {
  std::string s(a);
  s += '/';
  s += b;
  return s;
}

// center[label][feature]
std::vector<std::vector<double>> ClassCenters(const SyntheticSpec& spec) {
  Rng rng = MakeStream(spec.seed, StreamName(streams::kData, "centers"));
  std::normal_distribution<double> dist(0.0, spec.center_scale);
  std::vector<std::vector<double>> centers(spec.n_classes);
  for (auto& c : centers) {
    c.resize(spec.num_features());
    for (double& v : c) v = dist(rng);
  }
  return centers;
}

}  // namespace

void SyntheticSpec::Validate() const {
  if (n_classes < 2) throw ConfigError("n_classes must be >= 2");
  if (samples_per_class < 1 || test_per_class < 1 ||
      positions_per_channel < 1) {
    throw ConfigError("sample and position counts must be >= 1");
  }
  if (channels < 2) {
    throw ConfigError("channels must be >= 2 for the transform to matter");
  }
  if (!std::isfinite(center_scale) || center_scale < 0.0 ||
      !std::isfinite(noise_std) || noise_std < 0.0) {
    throw ConfigError("center_scale and noise_std must be finite and >= 0");
  }
}

Matrix Dataset::FeatureMatrix() const {
  Matrix m(static_cast<Eigen::Index>(samples.size()), num_features());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& f = samples[i].features;
    for (std::size_t j = 0; j < f.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f[j];
    }
  }
  return m;
}

std::vector<int> Dataset::Labels() const {
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (const Sample& s : samples) labels.push_back(s.label);
  return labels;
}

std::string_view SkewSchemeName(SkewScheme scheme) {
  return scheme == SkewScheme::kSensitive ? "sensitive" : "minority";
}

SkewScheme ParseSkewScheme(std::string_view name) {
  if (name == "sensitive") return SkewScheme::kSensitive;
  if (name == "minority") return SkewScheme::kMinority;
  throw ConfigError("unknown skew scheme '" + std::string(name) + "'");
}

SkewPlan SkewPlan::Sensitive(int n_classes, double high, double low) {
  SkewPlan plan;
  plan.scheme = SkewScheme::kSensitive;
  plan.skewed_fraction = high;
  plan.other_fraction = low;
  for (int c = 0; c < n_classes / 2; ++c) plan.skewed_classes.push_back(c);
  return plan;
}

SkewPlan SkewPlan::Minority(double fraction) {
  SkewPlan plan;
  plan.scheme = SkewScheme::kMinority;
  plan.skewed_fraction = fraction;
  plan.other_fraction = fraction;
  return plan;
}

void SkewPlan::Validate(int n_classes) const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(skewed_fraction) || !in_unit(other_fraction)) {
    throw ConfigError("skew fractions must lie in [0, 1]");
  }
  if (scheme == SkewScheme::kSensitive) {
    if (n_classes % 2 != 0 ||
        static_cast<int>(skewed_classes.size()) * 2 != n_classes) {
      throw ConfigError("sensitive skew needs exactly half of an even number "
                        "of classes in the skewed set");
    }
    std::vector<int> sorted = skewed_classes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
        sorted.front() < 0 || sorted.back() >= n_classes) {
      throw ConfigError("skewed classes must be distinct valid labels");
    }
  }
}

double SkewPlan::FractionFor(int label) const {
  if (scheme == SkewScheme::kMinority) return skewed_fraction;
  const bool skewed = std::find(skewed_classes.begin(), skewed_classes.end(),
                                label) != skewed_classes.end();
  return skewed ? skewed_fraction : other_fraction;
}

Dataset GenerateBase(const SyntheticSpec& spec, int per_class,
                     std::string_view stream) {
  spec.Validate();
  if (per_class < 1) throw ConfigError("per-class sample count must be >= 1");
  const auto centers = ClassCenters(spec);
  Rng rng = MakeStream(spec.seed, StreamName(streams::kData, stream));
  std::normal_distribution<double> noise(0.0, 1.0);

  Dataset data;
  data.num_classes = spec.n_classes;
  data.channels = spec.channels;
  data.samples.reserve(static_cast<std::size_t>(spec.n_classes) * per_class);
  std::int64_t id = 0;
  for (int label = 0; label < spec.n_classes; ++label) {
    for (int j = 0; j < per_class; ++j) {
      Sample s;
      s.id = id++;
      s.label = label;
      s.features = centers[label];
      if (spec.noise_std > 0.0) {
        for (double& v : s.features) v += spec.noise_std * noise(rng);
      }
      data.samples.push_back(std::move(s));
    }
  }
  return data;
}

std::vector<double> AttributeTransform(std::span<const double> features,
                                       int channels) {
  if (channels < 1 || features.size() % channels != 0) {
    throw UsageError("feature length " + std::to_string(features.size()) +
                     " is not divisible by " + std::to_string(channels) +
                     " channels");
  }
  const std::size_t positions = features.size() / channels;
  std::vector<double> out(features.begin(), features.end());
  for (std::size_t p = 0; p < positions; ++p) {
    bool uniform = true;
    double sum = 0.0;
    for (int c = 0; c < channels; ++c) {
      const double v = features[c * positions + p];
      uniform = uniform && v == features[p];
      sum += v;
    }
    if (uniform) continue;
    const double mean = sum / channels;
    for (int c = 0; c < channels; ++c) out[c * positions + p] = mean;
  }
  return out;
}

bool IsTransformFixedPoint(std::span<const double> features, int channels) {
  return AttributeTransform(features, channels) ==
         std::vector<double>(features.begin(), features.end());
}

Dataset ApplySkew(Dataset data, const SkewPlan& plan, std::uint64_t seed) {
  plan.Validate(data.num_classes);
  Rng rng = MakeStream(seed, "skew");
  std::vector<std::vector<std::size_t>> by_class(data.num_classes);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    by_class.at(data.samples[i].label).push_back(i);
  }
  for (int label = 0; label < data.num_classes; ++label) {
    auto& idx = by_class[label];
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto quota = static_cast<std::size_t>(
        std::llround(plan.FractionFor(label) * static_cast<double>(idx.size())));
    std::size_t done = 0;
    for (std::size_t i : idx) done += data.samples[i].attribute == 1;
    for (std::size_t i : idx) {
      if (done >= quota) break;
      Sample& s = data.samples[i];
      if (s.attribute == 1) continue;
      s.features = AttributeTransform(s.features, data.channels);
      s.attribute = 1;
      s.subgroup = 1;
      ++done;
    }
  }
  return data;
}

std::vector<int> TransformedPerClass(const Dataset& data) {
  std::vector<int> counts(data.num_classes, 0);
  for (const Sample& s : data.samples) counts.at(s.label) += s.attribute;
  return counts;
}

std::pair<Dataset, Dataset> Split(const Dataset& data, SplitRatio ratio,
                                  std::uint64_t seed,
                                  std::vector<std::string>* warnings) {
  if (ratio.train < 0 || ratio.validation < 0 ||
      ratio.train + ratio.validation == 0) {
    throw UsageError("split ratio needs nonnegative parts with a positive sum");
  }
  if (data.samples.empty()) throw UsageError("cannot split an empty dataset");

  const int parts = ratio.train + ratio.validation;
  // Cell key: label * 2 + attribute.
  std::vector<std::vector<std::size_t>> cells(
      static_cast<std::size_t>(data.num_classes) * 2);
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    cells.at(static_cast<std::size_t>(s.label) * 2 + s.attribute).push_back(i);
  }

  Rng rng = MakeStream(seed, "split");
  std::vector<bool> to_val(data.samples.size(), false);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    auto& cell = cells[k];
    if (cell.empty()) continue;
    std::shuffle(cell.begin(), cell.end(), rng);
    if (cell.size() % parts != 0 && warnings) {
      std::ostringstream msg;
      msg << "stratum (label " << k / 2 << ", attribute " << k % 2 << ") of "
          << cell.size() << " samples is not a multiple of " << parts
          << "; split rounded";
      warnings->push_back(msg.str());
    }
    const auto n_val = static_cast<std::size_t>(std::llround(
        static_cast<double>(cell.size()) * ratio.validation / parts));
    for (std::size_t j = 0; j < n_val; ++j) to_val[cell[j]] = true;
  }

  Dataset train{data.num_classes, data.channels, {}};
  Dataset val{data.num_classes, data.channels, {}};
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    (to_val[i] ? val : train).samples.push_back(data.samples[i]);
  }
  return {std::move(train), std::move(val)};
}

std::pair<Dataset, Dataset> MakeTestSets(const SyntheticSpec& spec) {
  Dataset colour = GenerateBase(spec, spec.test_per_class, "test");
  Dataset gray = colour;
  for (Sample& s : gray.samples) {
    s.features = AttributeTransform(s.features, gray.channels);
    s.attribute = 1;
    s.subgroup = 1;
  }
  return {std::move(colour), std::move(gray)};
}

GeneratedData GeneratePipeline(const SyntheticSpec& spec, const SkewPlan& plan,
                               SplitRatio ratio) {
  GeneratedData out;
  Dataset skewed = ApplySkew(GenerateBase(spec), plan, spec.seed);
  out.transformed_per_class = TransformedPerClass(skewed);
  std::tie(out.train, out.validation) =
      Split(skewed, ratio, spec.seed, &out.warnings);
  std::tie(out.test_colour, out.test_gray) = MakeTestSets(spec);
  for (Dataset* d :
       {&out.train, &out.validation, &out.test_colour, &out.test_gray}) {
    std::int64_t id = 0;
    for (Sample& s : d->samples) s.id = id++;
  }
  return out;
}

std::vector<bool> BiasConflicting(const Dataset& data) {
  std::vector<int> ones(data.num_classes, 0);
  std::vector<int> totals(data.num_classes, 0);
  for (const Sample& s : data.samples) {
    ones.at(s.label) += s.attribute;
    totals.at(s.label) += 1;
  }
  std::vector<bool> out;
  out.reserve(data.samples.size());
  for (const Sample& s : data.samples) {
    const int one = ones[s.label];
    const int zero = totals[s.label] - one;
    if (one == zero) {
      out.push_back(false);
    } else {
      out.push_back(s.attribute != (one > zero ? 1 : 0));
    }
  }
  return out;
}

}  // namespace epibias
