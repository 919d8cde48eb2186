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

#include "qudeval/metrics/mapping.h"

#include <sstream>

#include "qudeval/common/error.h"

namespace qudeval::metrics {

namespace {

std::vector<std::string> NamesOf(Criterion c) {
  auto names = corpus::CriterionLabels(c);
  return {names.begin(), names.end()};
}

std::string FormatScore(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

}  // namespace

MappingFunction::MappingFunction(std::string id, Criterion criterion,
                                 std::vector<std::string> labels,
                                 std::vector<double> thresholds,
                                 std::vector<bool> inclusive, double lo, double hi)
    : id_(std::move(id)),
      criterion_(criterion),
      labels_(std::move(labels)),
      thresholds_(std::move(thresholds)),
      inclusive_(std::move(inclusive)),
      lo_(lo),
      hi_(hi) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvariantViolation, "mapping " + id_ + ": " + why);
  };
  if (!(lo_ < hi_)) fail("empty score range");
  if (labels_.size() < 2) fail("needs at least two labels");
  if (thresholds_.size() + 1 != labels_.size()) {
    fail("expected " + std::to_string(labels_.size() - 1) + " thresholds");
  }
  if (inclusive_.size() != thresholds_.size()) fail("one inclusivity flag per threshold");
  for (size_t i = 0; i < thresholds_.size(); ++i) {
    if (thresholds_[i] < lo_ || thresholds_[i] > hi_) fail("threshold outside range");
    if (i > 0 && !(thresholds_[i] < thresholds_[i - 1])) {
      fail("thresholds must be strictly decreasing");
    }
  }
  for (const auto& l : labels_) {
    if (!corpus::LabelRank(criterion_, l)) {
      throw Error(ErrorCode::kLabelOutsideOrder,
                  "mapping " + id_ + ": \"" + l + "\" is not a " +
                      std::string(corpus::CriterionName(criterion_)) + " label");
    }
  }
}

MappingFunction MappingFunction::CompScoreDefault() {
  return MappingFunction("gpt-scr-comp-default", Criterion::kComp, NamesOf(Criterion::kComp),
                         {80.0, 60.0}, {false, true}, 1.0, 100.0);
}

MappingFunction MappingFunction::RelvScoreDefault() {
  return MappingFunction("gpt-scr-relv-default", Criterion::kRelv, NamesOf(Criterion::kRelv),
                         {80.0, 20.0}, {true, true}, 1.0, 100.0);
}

MappingFunction MappingFunction::Bleu1SimDefault() {
  return MappingFunction("bleu1-sim-default", Criterion::kRelv, NamesOf(Criterion::kRelv),
                         {0.05, 0.01}, {false, true}, 0.0, 1.0);
}

int MappingFunction::Band(double score) const {
  if (!(score >= lo_ && score <= hi_)) {
    throw Error(ErrorCode::kOutOfRange,
                "score " + FormatScore(score) + " outside [" + FormatScore(lo_) + ", " +
                    FormatScore(hi_) + "] of mapping " + id_);
  }
  for (size_t i = 0; i < thresholds_.size(); ++i) {
    bool above = inclusive_[i] ? score >= thresholds_[i] : score > thresholds_[i];
    if (above) return static_cast<int>(i);
  }
  return static_cast<int>(thresholds_.size());
}

const std::string& MappingFunction::Map(double score) const { return labels_[Band(score)]; }

nlohmann::ordered_json MappingFunction::ToJson() const {
  nlohmann::ordered_json j;
  j["id"] = id_;
  j["criterion"] = corpus::CriterionName(criterion_);
  j["labels"] = labels_;
  j["thresholds"] = thresholds_;
  j["inclusive"] = inclusive_;
  j["range"] = {lo_, hi_};
  return j;
}

MappingFunction MappingFunction::FromJson(const nlohmann::json& j) {
  try {
    auto criterion = corpus::ParseCriterion(j.at("criterion").get<std::string>());
    if (!criterion) throw Error(ErrorCode::kSchemaViolation, "mapping: unknown criterion");
    auto range = j.at("range").get<std::vector<double>>();
    if (range.size() != 2) throw Error(ErrorCode::kSchemaViolation, "mapping: range needs 2 values");
    return MappingFunction(j.at("id").get<std::string>(), *criterion,
                           j.at("labels").get<std::vector<std::string>>(),
                           j.at("thresholds").get<std::vector<double>>(),
                           j.at("inclusive").get<std::vector<bool>>(), range[0], range[1]);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("mapping: ") + e.what());
  }
}

nlohmann::ordered_json VerdictToJson(const MetricVerdict& v) {
  nlohmann::ordered_json j;
  j["edge_id"] = v.edge_id;
  j["metric_id"] = v.metric_id;
  j["criterion"] = corpus::CriterionName(v.criterion);
  j["label"] = v.label;
  if (v.raw_score) {
    j["raw_score"] = *v.raw_score;
  } else {
    j["raw_score"] = nullptr;
  }
  j["provenance"] = v.provenance;
  return j;
}

MetricVerdict VerdictFromJson(const nlohmann::json& j) {
  try {
    MetricVerdict v;
    v.edge_id = j.at("edge_id").get<std::string>();
    v.metric_id = j.at("metric_id").get<std::string>();
    auto c = corpus::ParseCriterion(j.at("criterion").get<std::string>());
    if (!c) throw Error(ErrorCode::kSchemaViolation, "verdict: unknown criterion");
    v.criterion = *c;
    v.label = j.at("label").get<std::string>();
    if (j.contains("raw_score") && !j.at("raw_score").is_null()) {
      v.raw_score = j.at("raw_score").get<double>();
    }
    v.provenance = j.value("provenance", "");
    ValidateVerdictLabel(v);
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("verdict: ") + e.what());
  }
}

void ValidateVerdictLabel(const MetricVerdict& v) {
  if (v.label == corpus::kSkippedName) return;
  if (corpus::LabelRank(v.criterion, v.label)) return;
  if (v.criterion == Criterion::kComp && (v.label == kAnswered || v.label == kNotAnswered)) {
    return;
  }
  throw Error(ErrorCode::kLabelOutsideOrder,
              "verdict label \"" + v.label + "\" not valid for " +
                  std::string(corpus::CriterionName(v.criterion)));
}

}  // namespace qudeval::metrics
