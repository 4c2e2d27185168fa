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

#include "epibias/trainer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include "epibias/errors.h"
#include "epibias/rng.h"
#include "epibias/weighted_loss.h"

namespace epibias {
namespace {

void CheckDatasetFitsModel(const Dataset& data, const ModelSpec& spec) {
  if (data.samples.empty()) throw ConfigError("training set is empty");
  if (data.num_features() != spec.input_dim()) {
    throw ConfigError("dataset has " + std::to_string(data.num_features()) +
                      " features, model expects " +
                      std::to_string(spec.input_dim()));
  }
  if (data.num_classes != spec.num_classes()) {
    throw ConfigError("dataset has " + std::to_string(data.num_classes) +
                      " classes, model outputs " +
                      std::to_string(spec.num_classes()));
  }
}

[[noreturn]] void ThrowNonFiniteGradient(const ParamVector& grad,
                                         const ModelSpec& spec,
                                         std::int64_t iteration) {
  std::size_t first = 0;
  double magnitude = 0.0;
  bool found = false;
  for (std::size_t k = 0; k < grad.size(); ++k) {
    if (!std::isfinite(grad[k])) {
      if (!found) first = k;
      found = true;
    } else {
      magnitude = std::max(magnitude, std::abs(grad[k]));
    }
  }
  const ParamLocation loc = LocateParam(spec, first);
  std::ostringstream msg;
  msg << "non-finite gradient at iteration " << iteration << ": layer "
      << loc.layer << (loc.is_bias ? " bias" : " weight") << " index "
      << first << " = " << grad[first]
      << "; largest finite magnitude " << magnitude;
  throw TrainingError(msg.str());
}

CycleWeightStats SummariseTable(const UncertaintyTable& table, double kappa) {
  CycleWeightStats stats;
  stats.cycle = table.cycle_index;
  const Kappa k(kappa);
  double sum_s = 0.0;
  double sum_w = 0.0;
  for (double s : table.sigma_true) {
    const double w = UncertaintyWeight(s, k);
    sum_s += s;
    sum_w += w;
    stats.max_sigma_true = std::max(stats.max_sigma_true, s);
    stats.max_weight = std::max(stats.max_weight, w);
  }
  const double n = static_cast<double>(table.sigma_true.size());
  stats.mean_sigma_true = sum_s / n;
  stats.mean_weight = sum_w / n;
  return stats;
}

}  // namespace

std::string_view TrainModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kBaselineSgd:
      return "baseline_sgd";
    case TrainMode::kBayesUnweighted:
      return "bayes_unweighted";
    case TrainMode::kBayesWeighted:
      return "bayes_weighted";
  }
  return "";
}

TrainMode ParseTrainMode(std::string_view name) {
  if (name == "baseline_sgd") return TrainMode::kBaselineSgd;
  if (name == "bayes_unweighted") return TrainMode::kBayesUnweighted;
  if (name == "bayes_weighted") return TrainMode::kBayesWeighted;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

void RunConfig::Validate() const {
  model.Validate();
  noise.Validate();
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw ConfigError("alpha0 must be a positive finite step size");
  }
  if (cycles < 1) throw ConfigError("cycles must be >= 1");
  if (epochs_per_cycle < 1) throw ConfigError("epochs_per_cycle must be >= 1");
  if (sampling_len < 1 || sampling_len > epochs_per_cycle) {
    throw ConfigError("sampling_len must lie in [1, epochs_per_cycle]");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!std::isfinite(prior_precision) || prior_precision < 0.0) {
    throw ConfigError("prior_precision must be finite and >= 0");
  }
  if (!std::isfinite(kappa) || kappa < 0.0) {
    throw ConfigError("kappa must be finite and >= 0");
  }
}

int RunConfig::batches_per_epoch(std::size_t n_train) const {
  return static_cast<int>((n_train + batch_size - 1) / batch_size);
}

StepSchedule RunConfig::Schedule(std::size_t n_train) const {
  StepSchedule s;
  s.alpha0 = alpha0;
  s.cycles = cycles;
  s.total_iters = static_cast<std::int64_t>(cycles) * epochs_per_cycle *
                  batches_per_epoch(n_train);
  return s;
}

TrainedEnsemble Train(const RunConfig& config, const Dataset& train,
                      const TrainHooks& hooks) {
  config.Validate();
  CheckDatasetFitsModel(train, config.model);

  const ModelSpec& spec = config.model;
  const Matrix features = train.FeatureMatrix();
  const std::vector<int> labels = train.Labels();
  const std::size_t n = labels.size();
  const StepSchedule schedule = config.Schedule(n);
  schedule.Validate();
  const int batches = config.batches_per_epoch(n);
  const double data_scale = static_cast<double>(n);

  Rng init_rng = MakeStream(config.seed, streams::kInit);
  Rng shuffle_rng = MakeStream(config.seed, streams::kShuffle);
  Rng noise_rng = MakeStream(config.seed, streams::kNoise);

  NoiseConfig noise = config.noise;
  if (!config.bayesian()) noise.temperature = 0.0;
  const Kappa kappa(config.mode == TrainMode::kBayesWeighted ? config.kappa
                                                             : 0.0);

  TrainedEnsemble out;
  out.spec = spec;
  out.train_attributes.reserve(n);
  for (const Sample& s : train.samples) out.train_attributes.push_back(s.attribute);

  ParamVector params = InitParams(spec, init_rng);
  SgldState state;
  PosteriorBank bank(labels, spec.num_classes());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Minibatch batch;
  std::vector<double> weights;
  std::int64_t iteration = 0;
  int draw_id = 0;

  for (int cycle = 0; cycle < config.cycles; ++cycle) {
    for (int e = 0; e < config.epochs_per_cycle; ++e) {
      const int epoch = cycle * config.epochs_per_cycle + e;
      const Phase phase =
          config.bayesian()
              ? PhaseOf(e, config.epochs_per_cycle, config.sampling_len)
              : Phase::kExploration;

      if (phase == Phase::kSampling) {
        for (double v : params.values) {
          if (!std::isfinite(v)) {
            throw TrainingError("non-finite parameter at the start of epoch " +
                                std::to_string(epoch));
          }
        }
        PosteriorDraw draw{draw_id++, cycle, epoch, params};
        bank.RecordPredictions(draw, spec, features);
        out.draws.push_back(std::move(draw));
      }

      const UncertaintyTable* table = nullptr;
      const bool weighted = config.mode == TrainMode::kBayesWeighted &&
                            phase == Phase::kExploration && cycle > 0;
      if (weighted) {
        table = bank.Table(cycle - 1);
        if (table == nullptr) {
          throw StateError("internal: no uncertainty table for cycle " +
                           std::to_string(cycle - 1));
        }
      }

      std::shuffle(order.begin(), order.end(), shuffle_rng);
      double loss_sum = 0.0;
      double weight_sum = 0.0;
      double epoch_lr = 0.0;
      for (int b = 0; b < batches; ++b) {
        const std::size_t begin = static_cast<std::size_t>(b) * config.batch_size;
        const std::size_t end =
            std::min(n, begin + static_cast<std::size_t>(config.batch_size));
        const auto rows = static_cast<Eigen::Index>(end - begin);
        batch.features.resize(rows, spec.input_dim());
        batch.labels.resize(rows);
        batch.sample_ids.resize(rows);
        weights.resize(rows);
        for (Eigen::Index r = 0; r < rows; ++r) {
          const std::size_t idx = order[begin + r];
          batch.features.row(r) = features.row(static_cast<Eigen::Index>(idx));
          batch.labels[r] = labels[idx];
          batch.sample_ids[r] = static_cast<std::int64_t>(idx);
          weights[r] =
              table ? UncertaintyWeight(table->sigma_true[idx], kappa) : 1.0;
        }

        ++iteration;
        const double alpha = Stepsize(iteration, schedule);
        if (b == 0) epoch_lr = alpha;

        LossAndGradient lg = ForwardBackward(params, spec, batch, weights);
        for (Eigen::Index r = 0; r < rows; ++r) {
          if (!std::isfinite(lg.losses[r])) {
            std::ostringstream msg;
            msg << "non-finite loss at iteration " << iteration << " (epoch "
                << epoch << ", sample " << batch.sample_ids[r] << ")";
            throw TrainingError(msg.str());
          }
          loss_sum += lg.losses[r];
          weight_sum += weights[r];
        }

        // Potential gradient: minibatch mean scaled to the dataset plus prior.
        ParamVector& grad = lg.gradient;
        for (std::size_t k = 0; k < grad.size(); ++k) {
          grad[k] = data_scale * grad[k] + config.prior_precision * params[k];
          if (!std::isfinite(grad[k])) ThrowNonFiniteGradient(grad, spec, iteration);
        }
        SgldStep(params, grad, alpha, noise, state, noise_rng);
        if (hooks.on_step) hooks.on_step(iteration, params);
      }

      EpochRecord rec{epoch,
                      cycle,
                      phase,
                      loss_sum / static_cast<double>(n),
                      weight_sum / static_cast<double>(n),
                      epoch_lr};
      if (hooks.on_epoch) hooks.on_epoch(rec);
      out.history.push_back(rec);
    }

    if (config.bayesian()) {
      const UncertaintyTable& table = bank.BuildTable(cycle);
      out.weight_stats.push_back(SummariseTable(table, kappa.value()));
      bank.Purge(cycle);
    }
  }

  if (config.bayesian()) {
    out.table = *bank.LatestTable();
  } else {
    out.draws.push_back(PosteriorDraw{
        0, config.cycles - 1, config.cycles * config.epochs_per_cycle,
        std::move(params)});
  }
  return out;
}

EnsemblePrediction PredictEnsemble(const TrainedEnsemble& ensemble,
                                   const Matrix& features) {
  if (ensemble.draws.empty()) throw UsageError("ensemble has no draws");
  if (features.cols() != ensemble.spec.input_dim()) {
    throw UsageError("feature dimension " + std::to_string(features.cols()) +
                     " does not match model input " +
                     std::to_string(ensemble.spec.input_dim()));
  }
  std::vector<Matrix> probs;
  probs.reserve(ensemble.draws.size());
  for (const PosteriorDraw& d : ensemble.draws) {
    probs.push_back(Forward(d.params, ensemble.spec, features));
  }
  EnsemblePrediction out;
  MeanAndSigma(probs, out.mean, out.sigma);
  out.predicted.resize(out.mean.rows());
  for (Eigen::Index i = 0; i < out.mean.rows(); ++i) {
    out.predicted[i] = ArgMax(std::span<const double>(
        out.mean.data() + i * out.mean.cols(),
        static_cast<std::size_t>(out.mean.cols())));
  }
  return out;
}

double ValidationLoss(const TrainedEnsemble& ensemble, const Dataset& data) {
  if (data.samples.empty()) throw UsageError("validation set is empty");
  const EnsemblePrediction pred =
      PredictEnsemble(ensemble, data.FeatureMatrix());
  double sum = 0.0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const double p =
        pred.mean(static_cast<Eigen::Index>(i), data.samples[i].label);
    sum += -std::log(std::max(p, kProbabilityFloor));
  }
  return sum / static_cast<double>(data.samples.size());
}

std::vector<EvalRecord> MakeEvalRecords(const EnsemblePrediction& prediction,
                                        const Dataset& data) {
  if (prediction.predicted.size() != data.samples.size()) {
    throw UsageError("prediction count does not match the dataset");
  }
  std::vector<EvalRecord> records;
  records.reserve(data.samples.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    records.push_back({s.label, prediction.predicted[i], s.attribute,
                       s.subgroup});
  }
  return records;
}

TestSetEvaluation EvaluateOnTestSets(const TrainedEnsemble& ensemble,
                                     const Dataset& test_colour,
                                     const Dataset& test_gray) {
  TestSetEvaluation out;
  for (const Dataset* d : {&test_colour, &test_gray}) {
    auto recs = MakeEvalRecords(PredictEnsemble(ensemble, d->FeatureMatrix()), *d);
    out.records.insert(out.records.end(), recs.begin(), recs.end());
  }
  out.report = BuildFairnessReport(out.records, ensemble.spec.num_classes());
  out.overall_tpr = OverallTpr(out.records);
  return out;
}

std::vector<double> DedupeGrid(const std::vector<double>& grid) {
  std::vector<double> out;
  for (double k : grid) {
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

SweepResult SweepKappa(const RunConfig& base, const std::vector<double>& grid,
                       const Dataset& train, const Dataset& validation,
                       const Dataset& test_colour, const Dataset& test_gray,
                       int jobs) {
  const std::vector<double> kappas = DedupeGrid(grid);
  if (kappas.empty()) throw UsageError("kappa grid is empty");
  for (double k : kappas) Kappa{k};
  if (validation.samples.empty()) throw UsageError("validation set is empty");

  SweepResult result;
  result.entries.resize(kappas.size());
  auto run_one = [&](std::size_t i) {
    SweepEntry& entry = result.entries[i];
    entry.kappa = kappas[i];
    try {
      RunConfig config = base;
      config.mode = TrainMode::kBayesWeighted;
      config.kappa = kappas[i];
      const TrainedEnsemble ensemble = Train(config, train);
      entry.val_loss = ValidationLoss(ensemble, validation);
      TestSetEvaluation eval =
          EvaluateOnTestSets(ensemble, test_colour, test_gray);
      entry.report = std::move(eval.report);
      entry.overall_tpr = eval.overall_tpr;
    } catch (const Error& e) {
      entry.error = e.what();
    }
  };

  const int workers =
      std::clamp(jobs, 1, static_cast<int>(kappas.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < kappas.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < kappas.size(); i = next++) run_one(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  double best_loss = std::numeric_limits<double>::infinity();
  for (const SweepEntry& e : result.entries) {
    if (e.error) {
      result.complete = false;
      continue;
    }
    if (e.val_loss < best_loss) {
      best_loss = e.val_loss;
      result.best_kappa = e.kappa;
    }
  }
  return result;
}

}  // namespace epibias
