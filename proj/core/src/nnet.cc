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

#include "epibias/nnet.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epibias/errors.h"

namespace epibias {
namespace {

using RowMajorMap = Eigen::Map<const Matrix>;
using VectorMap = Eigen::Map<const Eigen::RowVectorXd>;

void CheckShapes(const ParamVector& params, const ModelSpec& spec,
                 const Matrix& features) {
  spec.Validate();
  if (params.size() != spec.ParamCount()) {
    std::ostringstream msg;
    msg << "parameter vector has " << params.size() << " entries, model needs "
        << spec.ParamCount();
    throw ConfigError(msg.str());
  }
  if (features.cols() != spec.input_dim()) {
    std::ostringstream msg;
    msg << "feature dimension " << features.cols()
        << " does not match model input " << spec.input_dim();
    throw ConfigError(msg.str());
  }
}

RowMajorMap WeightsOf(const ParamVector& params, const ModelSpec& spec,
                      int layer) {
  return RowMajorMap(params.values.data() + spec.WeightOffset(layer),
                     spec.layer_sizes[layer], spec.layer_sizes[layer + 1]);
}

VectorMap BiasOf(const ParamVector& params, const ModelSpec& spec, int layer) {
  return VectorMap(params.values.data() + spec.BiasOffset(layer),
                   spec.layer_sizes[layer + 1]);
}

void Activate(Matrix& z, Activation a) {
  switch (a) {
    case Activation::kRelu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      z = z.array().tanh().matrix();
      break;
  }
}

void SoftmaxRows(Matrix& z) {
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    auto row = z.row(r);
    const double m = row.maxCoeff();
    row = (row.array() - m).exp().matrix();
    row /= row.sum();
  }
}

// Activations of every layer: acts[0] is the input, acts.back() the softmax.
std::vector<Matrix> ForwardAll(const ParamVector& params, const ModelSpec& spec,
                               const Matrix& features) {
  std::vector<Matrix> acts;
  acts.reserve(spec.num_layers() + 1);
  acts.push_back(features);
  for (int l = 0; l < spec.num_layers(); ++l) {
    Matrix z = acts.back() * WeightsOf(params, spec, l);
    z.rowwise() += BiasOf(params, spec, l);
    if (l + 1 < spec.num_layers()) {
      Activate(z, spec.activation);
    } else {
      SoftmaxRows(z);
    }
    acts.push_back(std::move(z));
  }
  return acts;
}

void CheckLabels(std::span<const int> labels, Eigen::Index rows, int classes) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw UsageError("label count does not match batch size");
  }
  for (int y : labels) {
    if (y < 0 || y >= classes) {
      throw UsageError("label " + std::to_string(y) + " outside [0, " +
                       std::to_string(classes) + ")");
    }
  }
}

}  // namespace

std::string_view ActivationName(Activation a) {
  return a == Activation::kRelu ? "relu" : "tanh";
}

Activation ParseActivation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

void ModelSpec::Validate() const {
  if (layer_sizes.size() < 2) {
    throw ConfigError("layer_sizes needs at least an input and output size");
  }
  for (int n : layer_sizes) {
    if (n < 1) throw ConfigError("layer sizes must be >= 1");
  }
}

std::size_t ModelSpec::ParamCount() const {
  std::size_t n = 0;
  for (int l = 0; l + 1 < static_cast<int>(layer_sizes.size()); ++l) {
    const std::size_t in = layer_sizes[l];
    const std::size_t out = layer_sizes[l + 1];
    n += in * out + out;
  }
  return n;
}

std::size_t ModelSpec::WeightOffset(int layer) const {
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l) {
    const std::size_t in = layer_sizes[l];
    const std::size_t out = layer_sizes[l + 1];
    off += in * out + out;
  }
  return off;
}

std::size_t ModelSpec::BiasOffset(int layer) const {
  return WeightOffset(layer) +
         static_cast<std::size_t>(layer_sizes[layer]) * layer_sizes[layer + 1];
}

ParamLocation LocateParam(const ModelSpec& spec, std::size_t index) {
  for (int l = 0; l < spec.num_layers(); ++l) {
    if (index < spec.BiasOffset(l)) return {l, false};
    if (index < spec.WeightOffset(l + 1)) return {l, true};
  }
  throw UsageError("parameter index out of range");
}

ParamVector InitParams(const ModelSpec& spec, Rng& rng) {
  spec.Validate();
  ParamVector params(spec.ParamCount());
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int in = spec.layer_sizes[l];
    const int out = spec.layer_sizes[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t w0 = spec.WeightOffset(l);
    for (std::size_t k = 0; k < static_cast<std::size_t>(in) * out; ++k) {
      params[w0 + k] = dist(rng);
    }
  }
  return params;
}

Matrix Forward(const ParamVector& params, const ModelSpec& spec,
               const Matrix& features) {
  CheckShapes(params, spec, features);
  return std::move(ForwardAll(params, spec, features).back());
}

std::vector<double> PerSampleCrossEntropy(const Matrix& probs,
                                          std::span<const int> labels) {
  CheckLabels(labels, probs.rows(), static_cast<int>(probs.cols()));
  std::vector<double> losses(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = probs(static_cast<Eigen::Index>(i), labels[i]);
    losses[i] = -std::log(std::max(p, kProbabilityFloor));
  }
  return losses;
}

LossAndGradient ForwardBackward(const ParamVector& params,
                                const ModelSpec& spec, const Minibatch& batch,
                                std::span<const double> sample_weights) {
  CheckShapes(params, spec, batch.features);
  const Eigen::Index rows = batch.features.rows();
  CheckLabels(batch.labels, rows, spec.num_classes());
  if (static_cast<Eigen::Index>(sample_weights.size()) != rows) {
    throw UsageError("sample weight count does not match batch size");
  }
  for (double w : sample_weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw UsageError("sample weights must be finite and nonnegative");
    }
  }

  std::vector<Matrix> acts = ForwardAll(params, spec, batch.features);

  LossAndGradient out;
  out.losses = PerSampleCrossEntropy(acts.back(), batch.labels);
  out.gradient = ParamVector(params.size());

  // d/dz of CE through softmax is (p - onehot), scaled per row by w_i / B.
  Matrix delta = acts.back();
  const double inv_b = 1.0 / static_cast<double>(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    delta(i, batch.labels[i]) -= 1.0;
    delta.row(i) *= sample_weights[i] * inv_b;
  }

  for (int l = spec.num_layers() - 1; l >= 0; --l) {
    const int in = spec.layer_sizes[l];
    const int out_dim = spec.layer_sizes[l + 1];
    Eigen::Map<Matrix> dw(out.gradient.values.data() + spec.WeightOffset(l),
                          in, out_dim);
    Eigen::Map<Eigen::RowVectorXd> db(
        out.gradient.values.data() + spec.BiasOffset(l), out_dim);
    dw.noalias() = acts[l].transpose() * delta;
    db = delta.colwise().sum();
    if (l == 0) break;

    Matrix upstream = delta * WeightsOf(params, spec, l).transpose();
    const Matrix& a = acts[l];
    switch (spec.activation) {
      case Activation::kRelu:
        upstream = upstream.cwiseProduct(
            (a.array() > 0.0).cast<double>().matrix());
        break;
      case Activation::kTanh:
        upstream = upstream.cwiseProduct(
            (1.0 - a.array().square()).matrix());
        break;
    }
    delta = std::move(upstream);
  }
  return out;
}

ParamVector Backward(const ParamVector& params, const ModelSpec& spec,
                     const Minibatch& batch,
                     std::span<const double> sample_weights) {
  return ForwardBackward(params, spec, batch, sample_weights).gradient;
}

int ArgMax(std::span<const double> row) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(row.size()); ++c) {
    if (row[c] > row[best]) best = c;
  }
  return best;
}

}  // namespace epibias
