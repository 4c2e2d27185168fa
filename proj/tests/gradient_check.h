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

// Central finite-difference check of Backward over random networks.

#ifndef EPIBIAS_TESTS_GRADIENT_CHECK_H_
#define EPIBIAS_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <cmath>
#include <vector>

#include "epibias/nnet.h"
#include "test_support.h"

namespace epibias::testing {

// Weighted mean cross entropy evaluated directly through Forward.
inline double WeightedObjective(const ParamVector& params, const ModelSpec& spec,
                                const Minibatch& batch,
                                const std::vector<double>& w) {
  const Matrix p = Forward(params, spec, batch);
  double total = 0.0;
  for (int i = 0; i < p.rows(); ++i) {
    total += w[i] * -std::log(p(i, batch.labels[i]));
  }
  return total / static_cast<double>(p.rows());
}

// Largest |fd - g| / max(1e-4, |fd| + |g|) over every coordinate of
// `instances` random model/batch pairs; the floor guards vanishing entries.
inline double WorstFiniteDifferenceError(Rng& rng, int instances, double h) {
  double worst = 0.0;
  for (int trial = 0; trial < instances; ++trial) {
    const ModelSpec spec = RandomSpec(rng);
    const ParamVector params = RandomParams(spec, rng, 0.7);
    const Minibatch batch = RandomBatch(spec, 3, rng);
    std::vector<double> w;
    for (int i = 0; i < 3; ++i) w.push_back(UniformReal(rng, 0.5, 2.0));
    const ParamVector g = Backward(params, spec, batch, w);
    for (std::size_t k = 0; k < params.size(); ++k) {
      ParamVector up = params;
      ParamVector down = params;
      up[k] += h;
      down[k] -= h;
      const double fd = (WeightedObjective(up, spec, batch, w) -
                         WeightedObjective(down, spec, batch, w)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - g[k]) /
                                  std::max(1e-4, std::abs(fd) + std::abs(g[k])));
    }
  }
  return worst;
}

}  // namespace epibias::testing

#endif  // EPIBIAS_TESTS_GRADIENT_CHECK_H_
