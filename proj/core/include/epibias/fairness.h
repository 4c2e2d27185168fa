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

// Group-fairness audits over (true class, predicted class, attribute) records.
// Every function throws UsageError naming the offending slice when a rate is
// undefined.

#ifndef EPIBIAS_FAIRNESS_H_
#define EPIBIAS_FAIRNESS_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epibias {

struct EvalRecord {
  int true_class = 0;
  int predicted_class = 0;
  int attribute = 0;  // strictly 0 or 1
  std::optional<int> subgroup;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

struct SubgroupTpr {
  int subgroup = 0;
  double tpr = 0.0;
  long positives = 0;
};

struct SubgroupTprTable {
  std::vector<SubgroupTpr> rows;  // ascending by TPR
  double gap = 0.0;               // max TPR - min TPR
  std::vector<std::string> warnings;
};

struct FairnessReport {
  double mean_accuracy = 0.0;
  double bias_amplification = 0.0;
  double opportunity_gap = 0.0;
  double average_odds = 0.0;
  std::vector<SubgroupTpr> subgroup_tpr;
  double tpr_gap = 0.0;
  std::vector<std::string> warnings;
};

// Mean of the accuracies on the attribute = 0 and attribute = 1 slices.
double MeanAttributeAccuracy(std::span<const EvalRecord> records);

// Per predicted class c, max(n1_c, n0_c)/(n1_c + n0_c) - 0.5 where n_a counts
// attribute-a records predicted as c; averaged over classes that were
// predicted at all. Classes never predicted are skipped with a warning.
double BiasAmplification(std::span<const EvalRecord> records,
                         std::vector<std::string>* warnings = nullptr,
                         int num_classes = 0);

// Mean over true classes y of |TPR_y(a=1) - TPR_y(a=0)|.
double OpportunityGap(std::span<const EvalRecord> records);

// 0.5 * (|dFPR| + |dTPR|) for `positive_class` treated one-vs-rest.
double AverageOddsGap(std::span<const EvalRecord> records, int positive_class);
// The one-vs-rest gap averaged over every true class present.
double AverageOddsGap(std::span<const EvalRecord> records);

// TPR per subgroup. With no positive class each record is a positive of its
// own true class, so the TPR is the subgroup's recall over all classes.
// Records without a subgroup fall back to their attribute.
SubgroupTprTable SubgroupTprs(std::span<const EvalRecord> records,
                              std::optional<int> positive_class = {});

// Accuracy over all records.
double OverallTpr(std::span<const EvalRecord> records);

// Computes every metric. A metric that is undefined for the records leaves
// its field at 0 and adds a warning instead of throwing. num_classes <= 0
// infers the class count from the records.
FairnessReport BuildFairnessReport(std::span<const EvalRecord> records,
                                   int num_classes = 0);

// JSON object with keys mean_accuracy, bias_amplification, opportunity_gap,
// average_odds, subgroup_tpr, tpr_gap, warnings.
std::string FairnessReportJson(const FairnessReport& report);

// Composition of the most and least uncertain fraction of a population.
struct DecileComposition {
  double top_rate = 0.0;     // flagged share among the highest `fraction`
  double bottom_rate = 0.0;  // flagged share among the lowest `fraction`
  double base_rate = 0.0;    // flagged share overall
  std::size_t bucket_size = 0;
};

// Ranks by `uncertainty` (ties by index) and reports how often `flagged`
// occurs in the top and bottom buckets of size ceil(fraction * n).
DecileComposition UncertaintyDecileComposition(
    std::span<const double> uncertainty, const std::vector<bool>& flagged,
    double fraction = 0.1);

}  // namespace epibias

#endif  // EPIBIAS_FAIRNESS_H_
