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

#ifndef EPIBIAS_WEIGHTED_LOSS_H_
#define EPIBIAS_WEIGHTED_LOSS_H_

#include <span>
#include <vector>

namespace epibias {

// Exponent on (1 + sigma). Zero turns the weighting off.
class Kappa {
 public:
  // Throws UsageError unless finite and >= 0.
  explicit Kappa(double value);
  double value() const { return value_; }

 private:
  double value_;
};

// Candidate exponents for the validation-loss grid search.
inline const std::vector<double> kDefaultKappaGrid = {0.0, 0.5, 1.0, 2.0,
                                                      4.0, 8.0, 16.0};

// (1 + sigma_true)^kappa. sigma_true must lie in [0, 0.5]; anything else
// means the uncertainty table is corrupt.
double UncertaintyWeight(double sigma_true, Kappa kappa);

// (1/B) * sum_i losses[i] * weights[i].
double WeightedBatchLoss(std::span<const double> losses,
                         std::span<const double> weights);

}  // namespace epibias

#endif  // EPIBIAS_WEIGHTED_LOSS_H_
