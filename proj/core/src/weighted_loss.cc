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

#include <cmath>
#include <string>

#include "epibias/errors.h"

namespace epibias {
namespace {

// Population std of values in [0,1] is at most 0.5; allow rounding slack.
constexpr double kSigmaSlack = 1e-12;

}  // namespace

Kappa::Kappa(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw UsageError("kappa must be finite and >= 0, got " +
                     std::to_string(value));
  }
}

double UncertaintyWeight(double sigma_true, Kappa kappa) {
  if (!(sigma_true >= 0.0 && sigma_true <= 0.5 + kSigmaSlack)) {
    throw UsageError("sigma " + std::to_string(sigma_true) +
                     " outside [0, 0.5]; uncertainty table is corrupt");
  }
  if (sigma_true > 0.5) sigma_true = 0.5;
  return std::pow(1.0 + sigma_true, kappa.value());
}

double WeightedBatchLoss(std::span<const double> losses,
                         std::span<const double> weights) {
  if (losses.size() != weights.size()) {
    throw UsageError("losses and weights differ in length");
  }
  if (losses.empty()) throw UsageError("empty batch");
  double sum = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!std::isfinite(losses[i]) || !std::isfinite(weights[i]) ||
        losses[i] < 0.0 || weights[i] < 0.0) {
      throw UsageError("losses and weights must be finite and nonnegative");
    }
    sum += losses[i] * weights[i];
  }
  return sum / static_cast<double>(losses.size());
}

}  // namespace epibias
