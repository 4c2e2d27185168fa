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

#include "epibias/posterior_bank.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epibias/errors.h"

namespace epibias {

void MeanAndSigma(std::span<const Matrix> draws, Matrix& mean, Matrix& sigma) {
  if (draws.empty()) throw StateError("no draws to summarise");
  const double t = static_cast<double>(draws.size());
  // Offsets from the first draw keep the mean exact when all draws agree.
  Matrix offset = Matrix::Zero(draws[0].rows(), draws[0].cols());
  for (const Matrix& p : draws) offset += p - draws[0];
  mean = draws[0] + offset / t;
  sigma = Matrix::Zero(mean.rows(), mean.cols());
  for (const Matrix& p : draws) sigma += (p - mean).cwiseAbs2();
  sigma = (sigma / t).cwiseSqrt();
}

PosteriorBank::PosteriorBank(std::vector<int> labels, int num_classes,
                             std::size_t max_log_bytes)
    : labels_(std::move(labels)),
      num_classes_(num_classes),
      max_log_bytes_(max_log_bytes) {
  if (num_classes_ < 1) throw UsageError("num_classes must be >= 1");
  for (int y : labels_) {
    if (y < 0 || y >= num_classes_) throw UsageError("label out of range");
  }
}

void PosteriorBank::RecordPredictions(const PosteriorDraw& draw,
                                      const ModelSpec& spec,
                                      const Matrix& features) {
  if (static_cast<std::size_t>(features.rows()) != labels_.size()) {
    throw UsageError("feature rows do not match the training set size");
  }
  RecordPredictions(draw, Forward(draw.params, spec, features));
}

void PosteriorBank::RecordPredictions(const PosteriorDraw& draw, Matrix probs) {
  if (draw.cycle_index < active_cycle_) {
    throw StateError("draw belongs to cycle " +
                     std::to_string(draw.cycle_index) +
                     ", which is no longer being sampled");
  }
  if (tables_.contains(draw.cycle_index)) {
    throw StateError("uncertainty table for cycle " +
                     std::to_string(draw.cycle_index) + " is already built");
  }
  if (static_cast<std::size_t>(probs.rows()) != labels_.size() ||
      probs.cols() != num_classes_) {
    throw UsageError("prediction matrix shape does not match the bank");
  }
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const double s = probs.row(i).sum();
    if (!(std::abs(s - 1.0) <= 1e-9) || probs.row(i).minCoeff() < 0.0) {
      throw UsageError("row " + std::to_string(i) +
                       " is not a probability distribution");
    }
  }
  CycleLog& log = logs_[draw.cycle_index];
  if (std::find(log.draw_ids.begin(), log.draw_ids.end(), draw.draw_id) !=
      log.draw_ids.end()) {
    throw StateError("draw " + std::to_string(draw.draw_id) +
                     " already recorded");
  }

  const std::size_t needed = (LogEntryCount() + labels_.size()) *
                             static_cast<std::size_t>(num_classes_) *
                             sizeof(double);
  if (needed > max_log_bytes_) {
    std::ostringstream msg;
    msg << "prediction log exhausted: " << needed << " bytes needed for "
        << labels_.size() << " samples x " << num_classes_
        << " classes, budget is " << max_log_bytes_ << " bytes";
    throw Error(msg.str());
  }

  log.draw_ids.push_back(draw.draw_id);
  log.probs.push_back(std::move(probs));
  active_cycle_ = draw.cycle_index;
}

const PosteriorBank::CycleLog* PosteriorBank::ActiveLog() const {
  auto it = logs_.find(active_cycle_);
  if (it == logs_.end() || it->second.probs.empty()) return nullptr;
  return &it->second;
}

void PosteriorBank::CheckSample(std::int64_t sample_id) const {
  if (sample_id < 0 || static_cast<std::size_t>(sample_id) >= labels_.size()) {
    throw UsageError("sample_id " + std::to_string(sample_id) +
                     " out of range");
  }
}

std::vector<double> PosteriorBank::PredictiveMean(
    std::int64_t sample_id) const {
  CheckSample(sample_id);
  std::vector<double> mu(num_classes_, 0.0);
  if (const CycleLog* log = ActiveLog()) {
    for (const Matrix& p : log->probs) {
      for (int c = 0; c < num_classes_; ++c) mu[c] += p(sample_id, c);
    }
    for (double& v : mu) v /= static_cast<double>(log->probs.size());
    return mu;
  }
  if (const UncertaintyTable* table = Table(active_cycle_)) {
    auto row = table->MeanRow(sample_id);
    return {row.begin(), row.end()};
  }
  throw StateError("no draws logged for the active cycle");
}

std::vector<double> PosteriorBank::EpistemicSigma(
    std::int64_t sample_id) const {
  CheckSample(sample_id);
  if (const CycleLog* log = ActiveLog()) {
    const std::vector<double> mu = PredictiveMean(sample_id);
    std::vector<double> sigma(num_classes_, 0.0);
    for (const Matrix& p : log->probs) {
      for (int c = 0; c < num_classes_; ++c) {
        const double d = p(sample_id, c) - mu[c];
        sigma[c] += d * d;
      }
    }
    for (double& v : sigma) {
      v = std::sqrt(v / static_cast<double>(log->probs.size()));
    }
    return sigma;
  }
  if (const UncertaintyTable* table = Table(active_cycle_)) {
    auto row = table->SigmaRow(sample_id);
    return {row.begin(), row.end()};
  }
  throw StateError("no draws logged for the active cycle");
}

const UncertaintyTable& PosteriorBank::BuildTable(int cycle_index) {
  auto it = logs_.find(cycle_index);
  if (it == logs_.end() || it->second.probs.empty()) {
    throw StateError("no draws logged for cycle " +
                     std::to_string(cycle_index));
  }
  Matrix mean;
  Matrix sigma;
  MeanAndSigma(it->second.probs, mean, sigma);

  UncertaintyTable table;
  table.cycle_index = cycle_index;
  table.num_classes = num_classes_;
  table.num_draws = static_cast<int>(it->second.probs.size());
  table.true_class = labels_;
  table.mean.assign(mean.data(), mean.data() + mean.size());
  table.sigma.assign(sigma.data(), sigma.data() + sigma.size());
  table.sigma_true.resize(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    table.sigma_true[i] = sigma(static_cast<Eigen::Index>(i), labels_[i]);
  }
  return tables_[cycle_index] = std::move(table);
}

void PosteriorBank::Purge(int cycle_index) {
  if (!tables_.contains(cycle_index)) {
    throw StateError("cannot purge cycle " + std::to_string(cycle_index) +
                     " before its uncertainty table is built");
  }
  logs_.erase(cycle_index);
}

const UncertaintyTable* PosteriorBank::Table(int cycle_index) const {
  auto it = tables_.find(cycle_index);
  return it == tables_.end() ? nullptr : &it->second;
}

const UncertaintyTable* PosteriorBank::LatestTable() const {
  return tables_.empty() ? nullptr : &tables_.rbegin()->second;
}

std::size_t PosteriorBank::LogEntryCount() const {
  std::size_t n = 0;
  for (const auto& [cycle, log] : logs_) n += log.probs.size() * labels_.size();
  return n;
}

std::size_t PosteriorBank::num_draws(int cycle_index) const {
  auto it = logs_.find(cycle_index);
  if (it != logs_.end() && !it->second.probs.empty()) {
    return it->second.probs.size();
  }
  const UncertaintyTable* table = Table(cycle_index);
  return table ? table->num_draws : 0;
}

std::string UncertaintyTableCsv(const UncertaintyTable& table) {
  std::ostringstream out;
  out.precision(17);
  out << "sample_id,true_class,sigma_true";
  for (int c = 0; c < table.num_classes; ++c) out << ",sigma_" << c;
  out << '\n';
  for (std::size_t i = 0; i < table.num_samples(); ++i) {
    out << i << ',' << table.true_class[i] << ',' << table.sigma_true[i];
    for (double s : table.SigmaRow(i)) out << ',' << s;
    out << '\n';
  }
  return out.str();
}

}  // namespace epibias
