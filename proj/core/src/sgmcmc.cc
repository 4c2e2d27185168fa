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

#include <cmath>
#include <numbers>
#include <sstream>

#include "epibias/errors.h"

namespace epibias {

void StepSchedule::Validate() const {
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw ConfigError("alpha0 must be a positive finite step size");
  }
  if (total_iters < 1) throw ConfigError("total_iters must be >= 1");
  if (cycles < 1 || cycles > total_iters) {
    throw ConfigError("cycles must lie in [1, total_iters]");
  }
}

double Stepsize(std::int64_t iteration, const StepSchedule& schedule) {
  if (iteration < 1 || iteration > schedule.total_iters) {
    std::ostringstream msg;
    msg << "iteration " << iteration << " outside [1, "
        << schedule.total_iters << "]";
    throw UsageError(msg.str());
  }
  const std::int64_t k = schedule.iters_per_cycle();
  const double pos = static_cast<double>((iteration - 1) % k) /
                     static_cast<double>(k);
  return schedule.alpha0 / 2.0 * (std::cos(std::numbers::pi * pos) + 1.0);
}

void NoiseConfig::Validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be finite and >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must lie in [0, 1)");
  }
}

std::string_view PhaseName(Phase phase) {
  return phase == Phase::kSampling ? "sampling" : "exploration";
}

Phase PhaseOf(int epoch_in_cycle, int epochs_per_cycle, int sampling_len) {
  if (epochs_per_cycle < 1 || sampling_len < 1 ||
      sampling_len > epochs_per_cycle) {
    throw UsageError("sampling_len must lie in [1, epochs_per_cycle]");
  }
  if (epoch_in_cycle < 0 || epoch_in_cycle >= epochs_per_cycle) {
    throw UsageError("epoch_in_cycle outside [0, epochs_per_cycle)");
  }
  return epoch_in_cycle >= epochs_per_cycle - sampling_len ? Phase::kSampling
                                                           : Phase::kExploration;
}

void SgldStep(ParamVector& params, const ParamVector& grad, double alpha,
              const NoiseConfig& noise, SgldState& state, Rng& rng) {
  if (!(alpha > 0.0)) throw UsageError("step size must be positive");
  if (grad.size() != params.size()) {
    throw UsageError("gradient and parameter layouts differ");
  }
  for (std::size_t k = 0; k < grad.size(); ++k) {
    if (!std::isfinite(grad[k])) {
      std::ostringstream msg;
      msg << "non-finite gradient at coordinate " << k << " (value "
          << grad[k] << ")";
      throw TrainingError(msg.str());
    }
  }
  if (state.velocity.size() != params.size()) {
    state.velocity.assign(params.size(), 0.0);
  }

  const double m = noise.momentum;
  for (std::size_t k = 0; k < params.size(); ++k) {
    state.velocity[k] = m * state.velocity[k] + grad[k];
    params[k] -= alpha * state.velocity[k];
  }
  if (noise.temperature > 0.0) {
    std::normal_distribution<double> eta(
        0.0, std::sqrt(2.0 * alpha * noise.temperature));
    for (double& v : params.values) v += eta(rng);
  }
}

}  // namespace epibias
