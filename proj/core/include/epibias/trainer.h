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

// Cyclical SG-MCMC training with the uncertainty-weighted loss, the plain
// deterministic baseline, ensemble prediction, and the kappa grid search.

#ifndef EPIBIAS_TRAINER_H_
#define EPIBIAS_TRAINER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epibias/biased_data.h"
#include "epibias/fairness.h"
#include "epibias/nnet.h"
#include "epibias/posterior_bank.h"
#include "epibias/sgmcmc.h"

namespace epibias {

enum class TrainMode { kBaselineSgd, kBayesUnweighted, kBayesWeighted };

std::string_view TrainModeName(TrainMode mode);
TrainMode ParseTrainMode(std::string_view name);

struct RunConfig {
  ModelSpec model;
  TrainMode mode = TrainMode::kBayesWeighted;
  double alpha0 = 1e-4;
  int cycles = 4;
  int epochs_per_cycle = 20;
  int sampling_len = 5;
  NoiseConfig noise{1.0, 0.9};
  // Gaussian prior precision on every parameter (adds precision * theta to
  // the potential gradient).
  double prior_precision = 1.0;
  double kappa = 0.0;
  int batch_size = 100;
  std::uint64_t seed = 0;

  // Dataset files; only used by the command-line front end.
  std::string train_path;
  std::string val_path;
  std::string test_colour_path;
  std::string test_gray_path;
  // Optional pinned SHA-256 digests, keyed by "train", "val", ...
  std::map<std::string, std::string> pinned_sha256;

  // Throws ConfigError on any violated invariant.
  void Validate() const;
  bool bayesian() const { return mode != TrainMode::kBaselineSgd; }
  int batches_per_epoch(std::size_t n_train) const;
  // total_iters = cycles * epochs_per_cycle * batches_per_epoch.
  StepSchedule Schedule(std::size_t n_train) const;
};

struct EpochRecord {
  int epoch = 0;
  int cycle = 0;
  Phase phase = Phase::kExploration;
  double mean_loss = 0.0;
  double mean_weight = 1.0;
  double lr = 0.0;  // step size at the epoch's first iteration

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

// Summary of an uncertainty table under the run's kappa.
struct CycleWeightStats {
  int cycle = 0;
  double mean_sigma_true = 0.0;
  double max_sigma_true = 0.0;
  double mean_weight = 1.0;
  double max_weight = 1.0;

  friend bool operator==(const CycleWeightStats&,
                         const CycleWeightStats&) = default;
};

struct TrainedEnsemble {
  ModelSpec spec;
  std::vector<PosteriorDraw> draws;
  // Table of the final cycle (Bayesian modes only).
  std::optional<UncertaintyTable> table;
  // Training-set attributes aligned with the table rows.
  std::vector<int> train_attributes;
  std::vector<EpochRecord> history;
  std::vector<CycleWeightStats> weight_stats;

  friend bool operator==(const TrainedEnsemble&,
                         const TrainedEnsemble&) = default;
};

struct TrainHooks {
  std::function<void(const EpochRecord&)> on_epoch;
  // Called after every parameter update with the 1-based iteration.
  std::function<void(std::int64_t, const ParamVector&)> on_step;
};

// Runs the cyclical schedule. Sampling-phase epochs capture a draw at epoch
// start, log its training-set predictions, and update with the plain loss.
// Exploration epochs of cycle c > 0 weight each sample by the previous
// cycle's uncertainty; cycle 0 exploration is unweighted. Deterministic in
// the config seed.
TrainedEnsemble Train(const RunConfig& config, const Dataset& train,
                      const TrainHooks& hooks = {});

struct EnsemblePrediction {
  std::vector<int> predicted;  // argmax of mean, lowest index on ties
  Matrix mean;
  Matrix sigma;
};

EnsemblePrediction PredictEnsemble(const TrainedEnsemble& ensemble,
                                   const Matrix& features);

// Mean cross entropy of the ensemble's predictive mean.
double ValidationLoss(const TrainedEnsemble& ensemble, const Dataset& data);

std::vector<EvalRecord> MakeEvalRecords(const EnsemblePrediction& prediction,
                                        const Dataset& data);

struct TestSetEvaluation {
  std::vector<EvalRecord> records;  // colour records, then gray records
  FairnessReport report;
  double overall_tpr = 0.0;
};

TestSetEvaluation EvaluateOnTestSets(const TrainedEnsemble& ensemble,
                                     const Dataset& test_colour,
                                     const Dataset& test_gray);

struct SweepEntry {
  double kappa = 0.0;
  double val_loss = 0.0;
  FairnessReport report;
  double overall_tpr = 0.0;
  std::optional<std::string> error;  // set when the run aborted
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // in deduplicated grid order
  double best_kappa = 0.0;
  bool complete = true;
};

// Deduplicates `grid` keeping first occurrences.
std::vector<double> DedupeGrid(const std::vector<double>& grid);

// One bayes_weighted run per kappa with identical seeds; the best kappa
// minimises validation loss. Runs are spread over `jobs` worker threads.
SweepResult SweepKappa(const RunConfig& base, const std::vector<double>& grid,
                       const Dataset& train, const Dataset& validation,
                       const Dataset& test_colour, const Dataset& test_gray,
                       int jobs = 1);

}  // namespace epibias

#endif  // EPIBIAS_TRAINER_H_
