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


// Corpus-level reports: label distributions, significance, duplicate
// statistics, metric-vs-gold assessment, annotator agreement and
// correlation with human similarity judgments. Every report serializes to
// JSON with a "kind" field and renders to aligned text from that JSON.

#ifndef QUDEVAL_ASSESS_REPORTS_H_
#define QUDEVAL_ASSESS_REPORTS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qudeval/assess/stats.h"
#include "qudeval/corpus/corpus.h"
#include "qudeval/metrics/mapping.h"

namespace qudeval::assess {

using corpus::Corpus;
using corpus::Criterion;
using corpus::CriteriaLabels;
using GoldMap = std::map<std::string, CriteriaLabels>;

struct SystemFilter {
  bool exclude_gpt4 = true;
  bool exclude_human = true;
  std::vector<corpus::System> only;  // empty accepts every other system

  bool Accepts(const corpus::System& system) const;
};

// Fixed presentation order of the known systems; custom systems follow by
// name.
std::vector<corpus::System> SystemsInCorpus(const Corpus& corpus);

struct SystemDistribution {
  std::string system;
  int64_t questions = 0;
  int64_t unlabeled = 0;  // edges without any annotation record
  // Per criterion: counts in CriterionLabels order and their denominator.
  // Lang counts every labeled, non-skipped question; the other criteria
  // count only questions whose Lang label is pass.
  std::map<Criterion, std::vector<int64_t>> counts;
  std::map<Criterion, int64_t> denominators;

  double Percent(Criterion c, size_t label) const;
};

struct DistributionReport {
  std::vector<SystemDistribution> rows;
};

DistributionReport BuildDistributionReport(const Corpus& corpus, const GoldMap& gold);

struct SignificanceRow {
  std::string system_a;
  std::string system_b;
  Criterion criterion = Criterion::kComp;
  ChiSquareResult result;
};

// Chi-square for every pair of rows on Comp, Givn and Relv.
std::vector<SignificanceRow> PairwiseSignificance(const DistributionReport& report);

struct DuplicateRow {
  std::string system;
  int64_t questions = 0;
  int64_t duplicates = 0;
  double duplicate_pct = 0.0;
  double avg_len = 0.0;
};

std::vector<DuplicateRow> BuildDuplicateReport(const Corpus& corpus);

// Gold labels restricted to edges that can be scored for `c`: accepted by
// the filter, Lang pass, and a non-skipped label for `c`.
std::map<std::string, std::string> EligibleGold(const Corpus& corpus, const GoldMap& gold,
                                                Criterion c, const SystemFilter& filter);

// Label order of a metric's verdicts: the criterion's labels, or
// answered/not_answered for the collapsed answer-matching metric.
std::vector<std::string> VerdictLabelOrder(Criterion c, bool collapsed);

// Gold completeness label as seen by a collapsed metric.
std::string CollapseGold(const std::string& comp_label);

struct MetricAssessment {
  std::string metric_id;
  Criterion criterion = Criterion::kComp;
  F1Report f1;
  int64_t eligible = 0;         // edges with usable gold labels
  int64_t missing_verdict = 0;  // eligible edges the metric did not score
  int64_t metric_skipped = 0;   // eligible edges the metric marked skipped
  BaselineResult random;        // expectation on the same gold labels
};

// Scores `verdicts` (one metric, one criterion) against gold on the
// eligible edges.
MetricAssessment AssessMetric(const Corpus& corpus, const GoldMap& gold,
                              std::span<const metrics::MetricVerdict> verdicts,
                              const std::string& metric_id, Criterion c,
                              const SystemFilter& filter);

struct BaselineReport {
  Criterion criterion = Criterion::kComp;
  std::vector<std::string> labels;
  std::vector<double> distribution;
  int64_t support = 0;
  BaselineResult closed_form;
  BaselineResult simulated;
  int64_t draws = 0;
  uint64_t seed = 0;
};

// Random baseline for a gold label distribution.
BaselineReport BuildBaselineReport(Criterion c, std::span<const int64_t> counts, int64_t draws,
                                   uint64_t seed);

struct CriterionAgreement {
  Criterion criterion = Criterion::kLang;
  Level level = Level::kNominal;
  // Empty when no edge carries two labels for the criterion.
  std::optional<double> alpha;
  std::optional<double> unanimity;
  std::optional<double> pairwise_f1;
  int64_t items = 0;  // edges with two or more labels for the criterion
};

struct AgreementReport {
  std::vector<std::string> annotators;
  int64_t edges = 0;  // edges carrying two or more annotators
  std::vector<CriterionAgreement> rows;
};

// Nominal for Lang and Givn, ordinal for Comp and Relv.
Level AgreementLevel(Criterion c);

// Uses every edge labeled by two or more annotators other than the
// adjudicated record. Skipped labels count as missing. Throws
// InsufficientAnnotators when no such edge exists.
AgreementReport BuildAgreementReport(const Corpus& corpus);

// One human similarity judgment target: candidate question, reference
// question and the mean of its 1-5 scores.
struct SimilarityItem {
  std::string edge_id;
  std::string candidate;
  std::string reference;
  double human_score = 0.0;
  int judgments = 0;
};

std::vector<SimilarityItem> SimilarityItems(const Corpus& corpus);

struct CorrelationRow {
  std::string metric_id;
  double rho = 0.0;
  int64_t n = 0;
};

nlohmann::ordered_json DistributionToJson(const DistributionReport& report,
                                          const std::vector<SignificanceRow>& significance);
nlohmann::ordered_json DuplicatesToJson(const std::vector<DuplicateRow>& rows);
nlohmann::ordered_json AssessmentToJson(const std::vector<MetricAssessment>& rows,
                                        const std::vector<BaselineReport>& baselines);
nlohmann::ordered_json AgreementToJson(const AgreementReport& report);
nlohmann::ordered_json CorrelationToJson(const std::vector<CorrelationRow>& rows);
nlohmann::ordered_json CalibrationToJson(const metrics::MappingFunction& mapping,
                                         double macro_f1, int64_t support,
                                         const std::vector<std::string>& warnings);

// Aligned-column text for any report above. The same JSON always yields
// the same bytes. Throws SchemaViolation for an unknown kind or a missing
// field.
std::string RenderReport(const nlohmann::json& report);

}  // namespace qudeval::assess

#endif  // QUDEVAL_ASSESS_REPORTS_H_
