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

#ifndef EPIBIAS_POSTERIOR_BANK_H_
#define EPIBIAS_POSTERIOR_BANK_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epibias/nnet.h"

namespace epibias {

struct PosteriorDraw {
  int draw_id = 0;
  int cycle_index = 0;
  int epoch_of_capture = 0;
  ParamVector params;

  friend bool operator==(const PosteriorDraw&, const PosteriorDraw&) = default;
};

// Per-sample predictive mean and epistemic spread from one cycle's draws.
struct UncertaintyTable {
  int cycle_index = 0;
  int num_classes = 0;
  int num_draws = 0;
  std::vector<int> true_class;    // per sample
  std::vector<double> mean;       // N x C, row-major
  std::vector<double> sigma;      // N x C, row-major
  std::vector<double> sigma_true; // sigma[i, true_class[i]]

  std::size_t num_samples() const { return true_class.size(); }
  std::span<const double> MeanRow(std::size_t i) const {
    return {mean.data() + i * num_classes, static_cast<std::size_t>(num_classes)};
  }
  std::span<const double> SigmaRow(std::size_t i) const {
    return {sigma.data() + i * num_classes,
            static_cast<std::size_t>(num_classes)};
  }

  friend bool operator==(const UncertaintyTable&,
                         const UncertaintyTable&) = default;
};

// Writes sample_id,true_class,sigma_true,sigma_0..sigma_{C-1}.
std::string UncertaintyTableCsv(const UncertaintyTable& table);

// Population mean and standard deviation of a set of probability vectors.
// Used by the bank and exposed for prediction-time ensembles.
void MeanAndSigma(std::span<const Matrix> draws, Matrix& mean, Matrix& sigma);

// Holds the per-draw predictive distributions of the training set for the
// cycle being sampled, and the uncertainty tables distilled from them.
//
// Reads are safe concurrently; Record/BuildTable/Purge need exclusive access.
class PosteriorBank {
 public:
  // `max_log_bytes` bounds the memory of live prediction logs.
  PosteriorBank(std::vector<int> labels, int num_classes,
                std::size_t max_log_bytes = std::size_t{2} << 30);

  // Forward pass of `draw` over every training sample; rows of `features`
  // are indexed by sample_id.
  void RecordPredictions(const PosteriorDraw& draw, const ModelSpec& spec,
                         const Matrix& features);
  // Same, with precomputed probabilities (N x C).
  void RecordPredictions(const PosteriorDraw& draw, Matrix probs);

  // Mean over the draws of the active cycle. Serves from the table once
  // the logs are purged.
  std::vector<double> PredictiveMean(std::int64_t sample_id) const;
  // Population std over the draws of the active cycle; zero for one draw.
  std::vector<double> EpistemicSigma(std::int64_t sample_id) const;

  // Summarises the logged draws of `cycle_index`.
  const UncertaintyTable& BuildTable(int cycle_index);
  // Frees the prediction logs of `cycle_index`; a second call is a no-op.
  void Purge(int cycle_index);

  const UncertaintyTable* Table(int cycle_index) const;
  const UncertaintyTable* LatestTable() const;

  // Number of stored (sample, draw) probability vectors.
  std::size_t LogEntryCount() const;
  std::size_t num_draws(int cycle_index) const;
  int active_cycle() const { return active_cycle_; }
  std::size_t num_samples() const { return labels_.size(); }

 private:
  struct CycleLog {
    std::vector<int> draw_ids;
    std::vector<Matrix> probs;
  };

  const CycleLog* ActiveLog() const;
  void CheckSample(std::int64_t sample_id) const;

  std::vector<int> labels_;
  int num_classes_;
  std::size_t max_log_bytes_;
  int active_cycle_ = -1;
  std::map<int, CycleLog> logs_;
  std::map<int, UncertaintyTable> tables_;
};

}  // namespace epibias

#endif  // EPIBIAS_POSTERIOR_BANK_H_
