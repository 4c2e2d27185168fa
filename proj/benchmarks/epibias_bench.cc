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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "epibias/biased_data.h"
#include "epibias/fairness.h"
#include "epibias/nnet.h"
#include "epibias/posterior_bank.h"
#include "epibias/rng.h"
#include "epibias/sgmcmc.h"

namespace epibias {
namespace {

Minibatch MakeBatch(const ModelSpec& spec, int rows, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Minibatch b;
  b.features.resize(rows, spec.input_dim());
  for (Eigen::Index i = 0; i < b.features.size(); ++i) b.features.data()[i] = n(rng);
  for (int i = 0; i < rows; ++i) {
    b.labels.push_back(i % spec.num_classes());
    b.sample_ids.push_back(i);
  }
  return b;
}

void BM_ForwardBackward(benchmark::State& state) {
  const ModelSpec spec{{24, static_cast<int>(state.range(0)), 10}};
  Rng rng(1);
  const ParamVector params = InitParams(spec, rng);
  const Minibatch batch = MakeBatch(spec, 100, rng);
  const std::vector<double> w(100, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ForwardBackward(params, spec, batch, w));
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_ForwardBackward)->Arg(32)->Arg(128);

void BM_SgldStep(benchmark::State& state) {
  ParamVector params(static_cast<std::size_t>(state.range(0)));
  ParamVector grad(params.size());
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = 1e-3 * static_cast<double>(k % 7);
  SgldState sgld;
  Rng rng(2);
  const NoiseConfig noise{1.0, 0.9};
  for (auto _ : state) {
    SgldStep(params, grad, 1e-5, noise, sgld, rng);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SgldStep)->Arg(1130)->Arg(100000);

void BM_MeanAndSigma(benchmark::State& state) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Matrix> draws(5, Matrix(5000, 10));
  for (Matrix& m : draws) {
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  }
  Matrix mean;
  Matrix sigma;
  for (auto _ : state) {
    MeanAndSigma(draws, mean, sigma);
    benchmark::DoNotOptimize(sigma.data());
  }
}
BENCHMARK(BM_MeanAndSigma);

std::vector<EvalRecord> MakeRecords(int n, int classes, Rng& rng) {
  std::uniform_int_distribution<int> cls(0, classes - 1);
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<EvalRecord> out;
  for (int i = 0; i < n; ++i) {
    const int y = cls(rng);
    out.push_back({y, bit(rng) ? y : cls(rng), bit(rng), std::nullopt});
  }
  return out;
}

void BM_FairnessReport(benchmark::State& state) {
  Rng rng(4);
  const auto records = MakeRecords(static_cast<int>(state.range(0)), 10, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildFairnessReport(records, 10));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FairnessReport)->Arg(10000)->Arg(100000);

void BM_GeneratePipeline(benchmark::State& state) {
  SyntheticSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(GeneratePipeline(spec, SkewPlan::Sensitive(10)));
  }
}
BENCHMARK(BM_GeneratePipeline)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace epibias

BENCHMARK_MAIN();
