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

// Stochastic gradient Langevin dynamics with a cyclical cosine step size.

#ifndef EPIBIAS_SGMCMC_H_
#define EPIBIAS_SGMCMC_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "epibias/nnet.h"
#include "epibias/rng.h"

namespace epibias {

struct StepSchedule {
  double alpha0 = 0.0;
  std::int64_t total_iters = 0;
  std::int64_t cycles = 1;

  // ceil(total_iters / cycles)
  std::int64_t iters_per_cycle() const {
    return (total_iters + cycles - 1) / cycles;
  }
  // Throws ConfigError on alpha0 <= 0, total_iters < 1, cycles outside
  // [1, total_iters].
  void Validate() const;
};

// alpha_i = alpha0/2 * (cos(pi * ((i-1) mod K) / K) + 1), K = iters_per_cycle.
// `iteration` is 1-based; outside [1, total_iters] is a UsageError.
double Stepsize(std::int64_t iteration, const StepSchedule& schedule);

struct NoiseConfig {
  // Scales the injected noise variance; 1 is plain SGLD, 0 is noise-free.
  double temperature = 1.0;
  // Heavy-ball coefficient in [0, 1).
  double momentum = 0.0;

  void Validate() const;
};

enum class Phase { kExploration, kSampling };

std::string_view PhaseName(Phase phase);

// Sampling iff epoch_in_cycle >= epochs_per_cycle - sampling_len.
Phase PhaseOf(int epoch_in_cycle, int epochs_per_cycle, int sampling_len);

// Caller-owned momentum buffer.
struct SgldState {
  std::vector<double> velocity;
};

// buffer <- m * buffer + grad;  params <- params - alpha * buffer + eta,
// eta ~ N(0, 2 * alpha * temperature) per coordinate. With temperature 0 no
// random numbers are drawn. Non-finite gradient entries throw TrainingError
// before anything is modified.
void SgldStep(ParamVector& params, const ParamVector& grad, double alpha,
              const NoiseConfig& noise, SgldState& state, Rng& rng);

}  // namespace epibias

#endif  // EPIBIAS_SGMCMC_H_
