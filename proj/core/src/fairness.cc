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

#include "epibias/fairness.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "epibias/errors.h"
#include "json.hpp"

namespace epibias {
namespace {

void CheckRecords(std::span<const EvalRecord> records, int num_classes = 0) {
  if (records.empty()) throw UsageError("no evaluation records");
  for (const EvalRecord& r : records) {
    if (r.attribute != 0 && r.attribute != 1) {
      throw UsageError("attribute must be 0 or 1");
    }
    if (r.true_class < 0 || r.predicted_class < 0 ||
        (num_classes > 0 &&
         (r.true_class >= num_classes || r.predicted_class >= num_classes))) {
      throw UsageError("class id out of range");
    }
  }
}

std::set<int> TrueClasses(std::span<const EvalRecord> records) {
  std::set<int> classes;
  for (const EvalRecord& r : records) classes.insert(r.true_class);
  return classes;
}

struct RateCounts {
  long hits[2] = {0, 0};
  long total[2] = {0, 0};

  double Rate(int a) const {
    return static_cast<double>(hits[a]) / static_cast<double>(total[a]);
  }
};

}  // namespace

double MeanAttributeAccuracy(std::span<const EvalRecord> records) {
  CheckRecords(records);
  RateCounts acc;
  for (const EvalRecord& r : records) {
    acc.total[r.attribute] += 1;
    acc.hits[r.attribute] += r.predicted_class == r.true_class;
  }
  for (int a : {0, 1}) {
    if (acc.total[a] == 0) {
      throw UsageError("attribute slice a=" + std::to_string(a) +
                       " is empty");
    }
  }
  return 0.5 * (acc.Rate(0) + acc.Rate(1));
}

double BiasAmplification(std::span<const EvalRecord> records,
                         std::vector<std::string>* warnings,
                         int num_classes) {
  CheckRecords(records, num_classes);
  // counts[c] = {attribute 0, attribute 1} predictions into c.
  std::map<int, std::array<long, 2>> counts;
  for (const EvalRecord& r : records) {
    counts[r.predicted_class][r.attribute] += 1;
  }
  if (warnings) {
    for (int c = 0; c < num_classes; ++c) {
      if (!counts.contains(c)) {
        warnings->push_back("bias_amplification: class " + std::to_string(c) +
                            " never predicted; excluded from the average");
      }
    }
  }
  double sum = 0.0;
  for (const auto& [c, n] : counts) {
    const double denom = static_cast<double>(n[0] + n[1]);
    sum += static_cast<double>(std::max(n[0], n[1])) / denom - 0.5;
  }
  return sum / static_cast<double>(counts.size());
}

double OpportunityGap(std::span<const EvalRecord> records) {
  CheckRecords(records);
  std::map<int, RateCounts> per_class;
  for (const EvalRecord& r : records) {
    RateCounts& rc = per_class[r.true_class];
    rc.total[r.attribute] += 1;
    rc.hits[r.attribute] += r.predicted_class == r.true_class;
  }
  double sum = 0.0;
  for (const auto& [y, rc] : per_class) {
    for (int a : {0, 1}) {
      if (rc.total[a] == 0) {
        throw UsageError("opportunity_gap: class " + std::to_string(y) +
                         " has no positives with attribute " +
                         std::to_string(a));
      }
    }
    sum += std::abs(rc.Rate(1) - rc.Rate(0));
  }
  return sum / static_cast<double>(per_class.size());
}

double AverageOddsGap(std::span<const EvalRecord> records,
                      int positive_class) {
  CheckRecords(records);
  RateCounts tpr;
  RateCounts fpr;
  for (const EvalRecord& r : records) {
    const bool predicted = r.predicted_class == positive_class;
    RateCounts& rc = r.true_class == positive_class ? tpr : fpr;
    rc.total[r.attribute] += 1;
    rc.hits[r.attribute] += predicted;
  }
  for (int a : {0, 1}) {
    if (tpr.total[a] == 0 || fpr.total[a] == 0) {
      throw UsageError("average_odds: class " +
                       std::to_string(positive_class) + " lacks " +
                       (tpr.total[a] == 0 ? "positives" : "negatives") +
                       " with attribute " + std::to_string(a));
    }
  }
  return 0.5 * (std::abs(fpr.Rate(1) - fpr.Rate(0)) +
                std::abs(tpr.Rate(1) - tpr.Rate(0)));
}

double AverageOddsGap(std::span<const EvalRecord> records) {
  CheckRecords(records);
  const std::set<int> classes = TrueClasses(records);
  double sum = 0.0;
  for (int c : classes) sum += AverageOddsGap(records, c);
  return sum / static_cast<double>(classes.size());
}

SubgroupTprTable SubgroupTprs(std::span<const EvalRecord> records,
                              std::optional<int> positive_class) {
  CheckRecords(records);
  // subgroup -> {true positives, positives}
  std::map<int, std::pair<long, long>> counts;
  for (const EvalRecord& r : records) {
    const int group = r.subgroup.value_or(r.attribute);
    auto& [tp, pos] = counts[group];
    if (positive_class) {
      if (r.true_class != *positive_class) continue;
      pos += 1;
      tp += r.predicted_class == *positive_class;
    } else {
      pos += 1;
      tp += r.predicted_class == r.true_class;
    }
  }

  SubgroupTprTable table;
  for (const auto& [group, c] : counts) {
    if (c.second == 0) {
      table.warnings.push_back("subgroup " + std::to_string(group) +
                               " has no positives; excluded");
      continue;
    }
    table.rows.push_back({group,
                          static_cast<double>(c.first) /
                              static_cast<double>(c.second),
                          c.second});
  }
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [](const SubgroupTpr& a, const SubgroupTpr& b) {
                     return a.tpr < b.tpr;
                   });
  if (!table.rows.empty()) {
    table.gap = table.rows.back().tpr - table.rows.front().tpr;
  }
  return table;
}

double OverallTpr(std::span<const EvalRecord> records) {
  CheckRecords(records);
  long correct = 0;
  for (const EvalRecord& r : records) correct += r.predicted_class == r.true_class;
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

FairnessReport BuildFairnessReport(std::span<const EvalRecord> records,
                                   int num_classes) {
  CheckRecords(records, num_classes);
  if (num_classes <= 0) {
    // Unknown class count: take it from the labels seen.
    for (const EvalRecord& r : records) {
      num_classes = std::max({num_classes, r.true_class + 1, r.predicted_class + 1});
    }
  }
  FairnessReport report;
  auto guarded = [&](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const UsageError& e) {
      report.warnings.push_back(std::string(name) + ": " + e.what());
      return 0.0;
    }
  };
  report.mean_accuracy =
      guarded("mean_accuracy", [&] { return MeanAttributeAccuracy(records); });
  report.bias_amplification = guarded("bias_amplification", [&] {
    return BiasAmplification(records, &report.warnings, num_classes);
  });
  report.opportunity_gap =
      guarded("opportunity_gap", [&] { return OpportunityGap(records); });
  report.average_odds =
      guarded("average_odds", [&] { return AverageOddsGap(records); });
  SubgroupTprTable table = SubgroupTprs(records);
  report.subgroup_tpr = std::move(table.rows);
  report.tpr_gap = table.gap;
  for (auto& w : table.warnings) report.warnings.push_back(std::move(w));
  return report;
}

std::string FairnessReportJson(const FairnessReport& report) {
  nlohmann::ordered_json j;
  j["mean_accuracy"] = report.mean_accuracy;
  j["bias_amplification"] = report.bias_amplification;
  j["opportunity_gap"] = report.opportunity_gap;
  j["average_odds"] = report.average_odds;
  j["subgroup_tpr"] = nlohmann::ordered_json::array();
  for (const SubgroupTpr& row : report.subgroup_tpr) {
    j["subgroup_tpr"].push_back(
        {{"subgroup", row.subgroup}, {"tpr", row.tpr}, {"positives", row.positives}});
  }
  j["tpr_gap"] = report.tpr_gap;
  j["warnings"] = report.warnings;
  return j.dump(2);
}

DecileComposition UncertaintyDecileComposition(
    std::span<const double> uncertainty, const std::vector<bool>& flagged,
    double fraction) {
  if (uncertainty.size() != flagged.size()) {
    throw UsageError("uncertainty and flag vectors differ in length");
  }
  if (uncertainty.empty()) throw UsageError("empty population");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw UsageError("fraction must lie in (0, 1]");
  }
  const std::size_t n = uncertainty.size();
  const auto k = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n) - 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return uncertainty[a] > uncertainty[b];
  });
  auto share = [&](auto first, auto last) {
    long hits = 0;
    for (auto it = first; it != last; ++it) hits += flagged[*it];
    return static_cast<double>(hits) / static_cast<double>(k);
  };

  DecileComposition out;
  out.bucket_size = k;
  out.top_rate = share(order.begin(), order.begin() + k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return uncertainty[a] < uncertainty[b];
  });
  out.bottom_rate = share(order.begin(), order.begin() + k);
  out.base_rate =
      static_cast<double>(std::count(flagged.begin(), flagged.end(), true)) /
      static_cast<double>(n);
  return out;
}

}  // namespace epibias
