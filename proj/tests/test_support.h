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

// Seeded generators shared by the property tests.

#ifndef EPIBIAS_TESTS_TEST_SUPPORT_H_
#define EPIBIAS_TESTS_TEST_SUPPORT_H_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "epibias/fairness.h"
#include "epibias/nnet.h"
#include "epibias/rng.h"

namespace epibias::testing {

inline int UniformInt(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double UniformReal(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline ModelSpec RandomSpec(Rng& rng) {
  ModelSpec spec;
  const int hidden_layers = UniformInt(rng, 0, 2);
  spec.layer_sizes.push_back(UniformInt(rng, 1, 5));
  for (int h = 0; h < hidden_layers; ++h) {
    spec.layer_sizes.push_back(UniformInt(rng, 1, 6));
  }
  spec.layer_sizes.push_back(UniformInt(rng, 2, 5));
  spec.activation = UniformInt(rng, 0, 1) ? Activation::kTanh : Activation::kRelu;
  return spec;
}

inline ParamVector RandomParams(const ModelSpec& spec, Rng& rng,
                                double scale = 1.0) {
  ParamVector p(spec.ParamCount());
  std::normal_distribution<double> n(0.0, scale);
  for (double& v : p.values) v = n(rng);
  return p;
}

inline Minibatch RandomBatch(const ModelSpec& spec, int size, Rng& rng) {
  Minibatch b;
  b.features.resize(size, spec.input_dim());
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < spec.input_dim(); ++j) b.features(i, j) = n(rng);
    b.labels.push_back(UniformInt(rng, 0, spec.num_classes() - 1));
    b.sample_ids.push_back(i);
  }
  return b;
}

inline std::vector<double> RandomSimplex(int c, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(c);
  double s = 0.0;
  for (double& v : p) s += (v = e(rng));
  for (double& v : p) v /= s;
  return p;
}

// Records where every (class, attribute) cell is populated and each class
// appears both as a prediction and as a non-prediction in each slice, so
// every rate is defined.
inline std::vector<EvalRecord> RandomRecords(Rng& rng, int num_classes,
                                             int num_subgroups, int n) {
  std::vector<EvalRecord> out;
  for (int a = 0; a < 2; ++a) {
    for (int y = 0; y < num_classes; ++y) {
      out.push_back({y, y, a, {}});
      out.push_back({y, (y + 1) % num_classes, a, {}});
    }
  }
  for (int i = 0; i < n; ++i) {
    EvalRecord r;
    r.true_class = UniformInt(rng, 0, num_classes - 1);
    r.predicted_class = UniformInt(rng, 0, 3) == 0
                            ? UniformInt(rng, 0, num_classes - 1)
                            : r.true_class;
    r.attribute = UniformInt(rng, 0, 1);
    out.push_back(r);
  }
  for (EvalRecord& r : out) {
    if (num_subgroups > 0) r.subgroup = UniformInt(rng, 0, num_subgroups - 1);
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("epibias_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace epibias::testing

#endif  // EPIBIAS_TESTS_TEST_SUPPORT_H_
