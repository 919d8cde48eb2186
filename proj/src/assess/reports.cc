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


#include "qudeval/assess/reports.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "qudeval/common/error.h"
#include "qudeval/metrics/llm.h"
#include "qudeval/qudparse/qudparse.h"

namespace qudeval::assess {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool IsRawAnnotator(const std::string& id) { return id != "adjudicated" && id != "gold"; }

std::vector<std::string> LabelNames(Criterion c) {
  auto names = corpus::CriterionLabels(c);
  return {names.begin(), names.end()};
}

double Percent(int64_t count, int64_t denominator) {
  return denominator == 0 ? 0.0 : 100.0 * static_cast<double>(count) / denominator;
}

ordered_json Share(int64_t count, int64_t denominator) {
  ordered_json j;
  j["count"] = count;
  j["denominator"] = denominator;
  j["percent"] = denominator == 0 ? ordered_json(nullptr) : ordered_json(Percent(count, denominator));
  return j;
}

ordered_json Optional(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json BaselineToJson(const BaselineResult& b) {
  ordered_json j;
  j["per_class"] = b.per_class;
  j["macro_f1"] = b.macro_f1;
  return j;
}

}  // namespace

bool SystemFilter::Accepts(const corpus::System& system) const {
  using Kind = corpus::System::Kind;
  if (exclude_gpt4 && system.kind() == Kind::kGpt4) return false;
  if (exclude_human && system.kind() == Kind::kDcqaHuman) return false;
  if (only.empty()) return true;
  return std::find(only.begin(), only.end(), system) != only.end();
}

std::vector<corpus::System> SystemsInCorpus(const Corpus& corpus) {
  std::set<corpus::System> systems;
  for (const auto& e : corpus.edges) systems.insert(e.system);
  return {systems.begin(), systems.end()};
}

double SystemDistribution::Percent(Criterion c, size_t label) const {
  return assess::Percent(counts.at(c).at(label), denominators.at(c));
}

DistributionReport BuildDistributionReport(const Corpus& corpus, const GoldMap& gold) {
  DistributionReport report;
  for (const auto& system : SystemsInCorpus(corpus)) {
    SystemDistribution row;
    row.system = system.ToString();
    for (Criterion c : corpus::kAllCriteria) {
      row.counts[c].assign(corpus::CriterionLabels(c).size(), 0);
      row.denominators[c] = 0;
    }
    for (const auto& e : corpus.edges) {
      if (!(e.system == system)) continue;
      ++row.questions;
      auto it = gold.find(e.edge_id);
      if (it == gold.end()) {
        ++row.unlabeled;
        continue;
      }
      const CriteriaLabels& labels = it->second;
      if (auto r = labels.Rank(Criterion::kLang)) {
        ++row.counts[Criterion::kLang][*r];
        ++row.denominators[Criterion::kLang];
      }
      if (labels.lang != corpus::LangLabel::kPass) continue;
      for (Criterion c : corpus::kMetricCriteria) {
        if (auto r = labels.Rank(c)) {
          ++row.counts[c][*r];
          ++row.denominators[c];
        }
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<SignificanceRow> PairwiseSignificance(const DistributionReport& report) {
  std::vector<SignificanceRow> out;
  for (Criterion c : corpus::kMetricCriteria) {
    for (size_t i = 0; i < report.rows.size(); ++i) {
      for (size_t j = i + 1; j < report.rows.size(); ++j) {
        const auto& a = report.rows[i];
        const auto& b = report.rows[j];
        if (a.denominators.at(c) == 0 || b.denominators.at(c) == 0) continue;
        out.push_back({a.system, b.system, c,
                       ChiSquareIndependence(a.counts.at(c), b.counts.at(c))});
      }
    }
  }
  return out;
}

std::vector<DuplicateRow> BuildDuplicateReport(const Corpus& corpus) {
  std::vector<DuplicateRow> rows;
  for (const auto& system : SystemsInCorpus(corpus)) {
    std::vector<corpus::QudEdge> edges;
    for (const auto& e : corpus.edges) {
      if (e.system == system) edges.push_back(e);
    }
    auto stats = qudparse::ComputeStats(edges);
    rows.push_back({system.ToString(), static_cast<int64_t>(edges.size()), stats.duplicates,
                    stats.duplicate_pct, stats.avg_len});
  }
  return rows;
}

std::map<std::string, std::string> EligibleGold(const Corpus& corpus, const GoldMap& gold,
                                                Criterion c, const SystemFilter& filter) {
  std::map<std::string, std::string> out;
  for (const auto& e : corpus.edges) {
    if (!filter.Accepts(e.system)) continue;
    auto it = gold.find(e.edge_id);
    if (it == gold.end()) continue;
    const CriteriaLabels& labels = it->second;
    if (labels.lang != corpus::LangLabel::kPass || !labels.Rank(c)) continue;
    out[e.edge_id] = std::string(labels.Name(c));
  }
  return out;
}

std::vector<std::string> VerdictLabelOrder(Criterion c, bool collapsed) {
  if (collapsed) return {std::string(metrics::kAnswered), std::string(metrics::kNotAnswered)};
  return LabelNames(c);
}

std::string CollapseGold(const std::string& comp_label) {
  return comp_label == metrics::kNotAnswered ? std::string(metrics::kNotAnswered)
                                             : std::string(metrics::kAnswered);
}

MetricAssessment AssessMetric(const Corpus& corpus, const GoldMap& gold,
                              std::span<const metrics::MetricVerdict> verdicts,
                              const std::string& metric_id, Criterion c,
                              const SystemFilter& filter) {
  std::map<std::string, const metrics::MetricVerdict*> by_edge;
  for (const auto& v : verdicts) {
    if (v.metric_id != metric_id || v.criterion != c) continue;
    if (!by_edge.emplace(v.edge_id, &v).second) {
      throw Error(ErrorCode::kInvariantViolation,
                  "two verdicts of " + metric_id + " for edge " + v.edge_id);
    }
  }
  const bool collapsed = metric_id == metrics::kGptAnsId;

  MetricAssessment out;
  out.metric_id = metric_id;
  out.criterion = c;
  std::vector<std::string> predicted, expected;
  for (const auto& [edge_id, label] : EligibleGold(corpus, gold, c, filter)) {
    ++out.eligible;
    auto it = by_edge.find(edge_id);
    if (it == by_edge.end()) {
      ++out.missing_verdict;
      continue;
    }
    if (it->second->label == corpus::kSkippedName) {
      ++out.metric_skipped;
      continue;
    }
    predicted.push_back(it->second->label);
    expected.push_back(collapsed ? CollapseGold(label) : label);
  }
  auto order = VerdictLabelOrder(c, collapsed);
  out.f1 = ComputeF1(predicted, expected, order);
  std::vector<double> dist(order.size(), 0.0);
  for (size_t g = 0; g < order.size(); ++g) {
    int64_t support = out.f1.matrix.tp(g) + out.f1.matrix.fn(g);
    if (!expected.empty()) dist[g] = static_cast<double>(support) / expected.size();
  }
  if (!expected.empty()) out.random = RandomBaseline(dist);
  return out;
}

BaselineReport BuildBaselineReport(Criterion c, std::span<const int64_t> counts, int64_t draws,
                                   uint64_t seed) {
  BaselineReport r;
  r.criterion = c;
  r.labels = LabelNames(c);
  if (counts.size() != r.labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "label counts do not match the label order");
  }
  for (int64_t n : counts) r.support += n;
  if (r.support == 0) {
    throw Error(ErrorCode::kDegenerateData, "no gold labels for the random baseline");
  }
  for (int64_t n : counts) r.distribution.push_back(static_cast<double>(n) / r.support);
  r.closed_form = RandomBaseline(r.distribution);
  r.draws = draws;
  r.seed = seed;
  if (draws > 0) r.simulated = SimulateRandomBaseline(r.distribution, draws, seed);
  return r;
}

Level AgreementLevel(Criterion c) {
  return c == Criterion::kLang || c == Criterion::kGivn ? Level::kNominal : Level::kOrdinal;
}

AgreementReport BuildAgreementReport(const Corpus& corpus) {
  std::map<std::string, std::map<std::string, const corpus::AnnotationRecord*>> by_edge;
  for (const auto& a : corpus.annotations) {
    if (IsRawAnnotator(a.annotator_id)) by_edge[a.edge_id][a.annotator_id] = &a;
  }
  std::set<std::string> annotators;
  std::vector<const std::map<std::string, const corpus::AnnotationRecord*>*> items;
  for (const auto& [edge_id, recs] : by_edge) {
    if (recs.size() < 2) continue;
    items.push_back(&recs);
    for (const auto& [id, rec] : recs) annotators.insert(id);
  }
  if (items.empty()) {
    throw Error(ErrorCode::kInsufficientAnnotators, "no edge is labeled by two annotators");
  }
  AgreementReport report;
  report.annotators.assign(annotators.begin(), annotators.end());
  report.edges = static_cast<int64_t>(items.size());
  for (Criterion c : corpus::kAllCriteria) {
    ReliabilityMatrix matrix(annotators.size(), std::vector<std::optional<int>>(items.size()));
    CriterionAgreement row;
    row.criterion = c;
    row.level = AgreementLevel(c);
    for (size_t u = 0; u < items.size(); ++u) {
      int present = 0;
      for (size_t a = 0; a < report.annotators.size(); ++a) {
        auto it = items[u]->find(report.annotators[a]);
        if (it == items[u]->end()) continue;
        matrix[a][u] = it->second->labels.Rank(c);
        if (matrix[a][u]) ++present;
      }
      if (present >= 2) ++row.items;
    }
    if (row.items > 0) {
      int k = static_cast<int>(corpus::CriterionLabels(c).size());
      row.alpha = KrippendorffAlpha(matrix, k, row.level);
      row.unanimity = UnanimityRate(matrix);
      row.pairwise_f1 = PairwiseF1(matrix, k);
    }
    report.rows.push_back(row);
  }
  return report;
}

std::vector<SimilarityItem> SimilarityItems(const Corpus& corpus) {
  std::map<std::pair<std::string, std::string>, SimilarityItem> grouped;
  for (const auto& s : corpus.similarities) {
    const corpus::QudEdge* edge = corpus.FindEdge(s.edge_id);
    if (edge == nullptr) {
      throw Error(ErrorCode::kSchemaViolation,
                  "similarity record names unknown edge " + s.edge_id);
    }
    auto& item = grouped[{s.edge_id, s.reference_question}];
    item.edge_id = s.edge_id;
    item.candidate = edge->question;
    item.reference = s.reference_question;
    item.human_score += s.score;
    ++item.judgments;
  }
  std::vector<SimilarityItem> out;
  for (auto& [key, item] : grouped) {
    item.human_score /= item.judgments;
    out.push_back(std::move(item));
  }
  return out;
}

ordered_json DistributionToJson(const DistributionReport& report,
                                const std::vector<SignificanceRow>& significance) {
  ordered_json j;
  j["kind"] = "distributions";
  j["rows"] = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["system"] = row.system;
    r["questions"] = row.questions;
    r["unlabeled"] = row.unlabeled;
    for (Criterion c : corpus::kAllCriteria) {
      ordered_json crit;
      crit["denominator"] = row.denominators.at(c);
      auto names = corpus::CriterionLabels(c);
      for (size_t l = 0; l < names.size(); ++l) {
        crit["labels"][std::string(names[l])] =
            Share(row.counts.at(c)[l], row.denominators.at(c));
      }
      r["criteria"][std::string(corpus::CriterionName(c))] = crit;
    }
    j["rows"].push_back(r);
  }
  j["significance"] = ordered_json::array();
  for (const auto& s : significance) {
    ordered_json r;
    r["criterion"] = corpus::CriterionName(s.criterion);
    r["system_a"] = s.system_a;
    r["system_b"] = s.system_b;
    r["statistic"] = s.result.statistic;
    r["df"] = s.result.df;
    r["p"] = s.result.p_bracket;
    r["significant"] = s.result.significant;
    r["dropped_columns"] = s.result.dropped_columns;
    j["significance"].push_back(r);
  }
  return j;
}

ordered_json DuplicatesToJson(const std::vector<DuplicateRow>& rows) {
  ordered_json j;
  j["kind"] = "dupstats";
  j["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    r["system"] = row.system;
    r["questions"] = row.questions;
    r["duplicates"] = Share(row.duplicates, row.questions);
    r["avg_len"] = {{"value", row.avg_len}, {"denominator", row.questions}};
    j["rows"].push_back(r);
  }
  return j;
}

ordered_json AssessmentToJson(const std::vector<MetricAssessment>& rows,
                              const std::vector<BaselineReport>& baselines) {
  ordered_json j;
  j["kind"] = "assess";
  j["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    const ConfusionMatrix& m = row.f1.matrix;
    ordered_json r;
    r["metric"] = row.metric_id;
    r["criterion"] = corpus::CriterionName(row.criterion);
    r["labels"] = m.labels;
    r["per_class"] = ordered_json::array();
    for (size_t c = 0; c < m.labels.size(); ++c) {
      r["per_class"].push_back({{"label", m.labels[c]},
                                {"f1", row.f1.per_class[c]},
                                {"counted", static_cast<bool>(row.f1.counted[c])},
                                {"gold_support", m.tp(c) + m.fn(c)},
                                {"predicted", m.tp(c) + m.fp(c)}});
    }
    r["macro_f1"] = {{"value", row.f1.macro_f1}, {"denominator", m.total()}};
    r["eligible"] = row.eligible;
    r["missing_verdict"] = row.missing_verdict;
    r["metric_skipped"] = row.metric_skipped;
    r["confusion"] = m.counts;
    r["random"] = BaselineToJson(row.random);
    j["rows"].push_back(r);
  }
  j["baselines"] = ordered_json::array();
  for (const auto& b : baselines) {
    ordered_json r;
    r["criterion"] = corpus::CriterionName(b.criterion);
    r["labels"] = b.labels;
    r["distribution"] = b.distribution;
    r["support"] = b.support;
    r["closed_form"] = BaselineToJson(b.closed_form);
    r["simulated"] = BaselineToJson(b.simulated);
    r["draws"] = b.draws;
    r["seed"] = b.seed;
    j["baselines"].push_back(r);
  }
  return j;
}

ordered_json AgreementToJson(const AgreementReport& report) {
  ordered_json j;
  j["kind"] = "agreement";
  j["edges"] = report.edges;
  j["annotators"] = report.annotators;
  j["rows"] = ordered_json::array();
  for (const auto& row : report.rows) {
    j["rows"].push_back({{"criterion", corpus::CriterionName(row.criterion)},
                         {"level", LevelName(row.level)},
                         {"alpha", Optional(row.alpha)},
                         {"unanimity", Optional(row.unanimity)},
                         {"pairwise_f1", Optional(row.pairwise_f1)},
                         {"items", row.items}});
  }
  return j;
}

ordered_json CorrelationToJson(const std::vector<CorrelationRow>& rows) {
  ordered_json j;
  j["kind"] = "correlate";
  j["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    j["rows"].push_back({{"metric", row.metric_id}, {"rho", row.rho}, {"n", row.n}});
  }
  return j;
}

ordered_json CalibrationToJson(const metrics::MappingFunction& mapping, double macro_f1,
                               int64_t support, const std::vector<std::string>& warnings) {
  ordered_json j;
  j["kind"] = "calibrate";
  j["mapping"] = mapping.ToJson();
  j["macro_f1"] = {{"value", macro_f1}, {"denominator", support}};
  j["warnings"] = warnings;
  return j;
}

}  // namespace qudeval::assess
