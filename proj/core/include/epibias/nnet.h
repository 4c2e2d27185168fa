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

// Small dense softmax classifiers (multinomial logistic regression and MLPs)
// with hand-written backpropagation. Parameters live in one flat vector so the
// samplers can treat the model as a point in R^n.

#ifndef EPIBIAS_NNET_H_
#define EPIBIAS_NNET_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "epibias/rng.h"

namespace epibias {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { kRelu, kTanh };

std::string_view ActivationName(Activation a);
Activation ParseActivation(std::string_view name);

struct ModelSpec {
  // Input dimension first, class count last.
  std::vector<int> layer_sizes;
  // Hidden-layer nonlinearity; the output layer is always softmax.
  Activation activation = Activation::kRelu;

  // Throws ConfigError unless there are >= 2 sizes, all >= 1.
  void Validate() const;

  int input_dim() const { return layer_sizes.front(); }
  int num_classes() const { return layer_sizes.back(); }
  int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }

  // Sum over layers of n_in * n_out + n_out.
  std::size_t ParamCount() const;
  // Offset of layer l's weight block; its bias block follows immediately.
  std::size_t WeightOffset(int layer) const;
  std::size_t BiasOffset(int layer) const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Flat parameter vector. Layout per layer: the n_in x n_out weight matrix in
// row-major order, then the n_out biases.
struct ParamVector {
  std::vector<double> values;

  ParamVector() = default;
  explicit ParamVector(std::size_t n) : values(n, 0.0) {}
  explicit ParamVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

struct ParamLocation {
  int layer = 0;
  bool is_bias = false;
};

// Maps a flat parameter index back to its layer (for diagnostics).
ParamLocation LocateParam(const ModelSpec& spec, std::size_t index);

struct Minibatch {
  Matrix features;                     // B x d
  std::vector<int> labels;             // in [0, C)
  std::vector<std::int64_t> sample_ids;
};

// Glorot-uniform weights, zero biases.
ParamVector InitParams(const ModelSpec& spec, Rng& rng);

// Class probabilities, one row per input row.
Matrix Forward(const ParamVector& params, const ModelSpec& spec,
               const Matrix& features);
inline Matrix Forward(const ParamVector& params, const ModelSpec& spec,
                      const Minibatch& batch) {
  return Forward(params, spec, batch.features);
}

// Probabilities below this are clamped inside the log.
inline constexpr double kProbabilityFloor = 1e-12;

// loss_i = -log(max(probs[i, labels[i]], kProbabilityFloor)).
std::vector<double> PerSampleCrossEntropy(const Matrix& probs,
                                          std::span<const int> labels);

struct LossAndGradient {
  std::vector<double> losses;  // unweighted per-sample cross entropy
  ParamVector gradient;        // of (1/B) sum_i w_i CE_i
};

// One forward pass and its backward pass.
LossAndGradient ForwardBackward(const ParamVector& params,
                                const ModelSpec& spec, const Minibatch& batch,
                                std::span<const double> sample_weights);

// Gradient of (1/B) * sum_i sample_weights[i] * CE_i.
ParamVector Backward(const ParamVector& params, const ModelSpec& spec,
                     const Minibatch& batch,
                     std::span<const double> sample_weights);

// Index of the largest entry; ties go to the lowest index.
int ArgMax(std::span<const double> row);

}  // namespace epibias

#endif  // EPIBIAS_NNET_H_
