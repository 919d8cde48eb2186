// Copyright 2026 The QUDeval Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QUDEVAL_METRICS_MAPPING_H_
#define QUDEVAL_METRICS_MAPPING_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qudeval/corpus/labels.h"

namespace qudeval::metrics {

using corpus::Criterion;

// Monotone map from a raw score range onto a criterion's labels, best label
// for the highest scores. thresholds[i] separates labels[i] from
// labels[i + 1]; a score equal to the threshold goes to the better band
// when inclusive[i] is set and to the worse band otherwise.
class MappingFunction {
 public:
  MappingFunction() = default;
  // Throws InvariantViolation unless thresholds are strictly decreasing,
  // inside [lo, hi], and number labels.size() - 1.
  MappingFunction(std::string id, Criterion criterion,
                  std::vector<std::string> labels, std::vector<double> thresholds,
                  std::vector<bool> inclusive, double lo, double hi);

  // Score bands used by the prompted scorers and BLEU1-sim.
  static MappingFunction CompScoreDefault();   // >80 direct, [60,80] unfocused
  static MappingFunction RelvScoreDefault();   // >=80 fully, [20,80) partially
  static MappingFunction Bleu1SimDefault();    // >0.05 fully, [0.01,0.05] partially

  // Label for `score`. Throws OutOfRange outside [lo, hi].
  const std::string& Map(double score) const;
  // 0-based band index of `score`, 0 = best.
  int Band(double score) const;

  const std::string& id() const { return id_; }
  Criterion criterion() const { return criterion_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& thresholds() const { return thresholds_; }
  const std::vector<bool>& inclusive() const { return inclusive_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  nlohmann::ordered_json ToJson() const;
  static MappingFunction FromJson(const nlohmann::json& j);

 private:
  std::string id_;
  Criterion criterion_ = Criterion::kComp;
  std::vector<std::string> labels_;
  std::vector<double> thresholds_;
  std::vector<bool> inclusive_;
  double lo_ = 0.0;
  double hi_ = 1.0;
};

// GPT-Ans cannot tell a direct answer from an unfocused one, so its verdicts
// use this collapsed answer-compatibility label set.
inline constexpr std::string_view kAnswered = "answered";
inline constexpr std::string_view kNotAnswered = "not_answered";

struct MetricVerdict {
  std::string edge_id;
  std::string metric_id;
  Criterion criterion = Criterion::kComp;
  std::string label;  // a label of `criterion`, "skipped", or answered/not_answered
  std::optional<double> raw_score;
  std::string provenance;  // lexicon hash, cache key(s), or mapping id

  bool operator==(const MetricVerdict&) const = default;
};

// One line of verdicts.jsonl.
nlohmann::ordered_json VerdictToJson(const MetricVerdict& v);
MetricVerdict VerdictFromJson(const nlohmann::json& j);

// Checks the label against the criterion (throws LabelOutsideOrder).
void ValidateVerdictLabel(const MetricVerdict& v);

}  // namespace qudeval::metrics

#endif  // QUDEVAL_METRICS_MAPPING_H_
