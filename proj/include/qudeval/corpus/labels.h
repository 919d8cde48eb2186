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

// The four evaluation criteria and their label sets. Every label enum lists
// its values from best to worst and ends with kSkipped, so the underlying
// integer of a non-skipped value is its rank in CriterionLabels().

#ifndef QUDEVAL_CORPUS_LABELS_H_
#define QUDEVAL_CORPUS_LABELS_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace qudeval::corpus {

enum class Criterion { kLang, kComp, kGivn, kRelv };

enum class LangLabel { kPass, kFail, kSkipped };
enum class CompLabel { kDirect, kUnfocused, kNotAnswered, kSkipped };
enum class GivnLabel { kNoNew, kAnswerLeak, kHallucination, kSkipped };
enum class RelvLabel { kFully, kPartially, kNotGrounded, kSkipped };

inline constexpr Criterion kAllCriteria[] = {
    Criterion::kLang, Criterion::kComp, Criterion::kGivn, Criterion::kRelv};
// The criteria automatic metrics are assessed on.
inline constexpr Criterion kMetricCriteria[] = {
    Criterion::kComp, Criterion::kGivn, Criterion::kRelv};

inline constexpr std::string_view kSkippedName = "skipped";

std::string_view CriterionName(Criterion c);
// Accepts "lang", "comp", "givn", "relv".
std::optional<Criterion> ParseCriterion(std::string_view name);

// Non-skipped label names of `c`, best first.
std::span<const std::string_view> CriterionLabels(Criterion c);

// Rank of `label` within CriterionLabels(c); nullopt for "skipped" or an
// unknown name.
std::optional<int> LabelRank(Criterion c, std::string_view label);

struct CriteriaLabels {
  LangLabel lang = LangLabel::kSkipped;
  CompLabel comp = CompLabel::kSkipped;
  GivnLabel givn = GivnLabel::kSkipped;
  RelvLabel relv = RelvLabel::kSkipped;

  static CriteriaLabels AllSkipped() { return {}; }

  // Rank of the label chosen for `c`, nullopt when skipped.
  std::optional<int> Rank(Criterion c) const;
  std::string_view Name(Criterion c) const;
  // Sets criterion `c` from a label name (including "skipped"). Returns false
  // if the name is not valid for `c`.
  bool Set(Criterion c, std::string_view name);

  bool operator==(const CriteriaLabels&) const = default;
};

// Describes the first skip-propagation violation, or nullopt if the labels
// are consistent. Ill-formed edges must be skipped on every criterion; a
// failed language check must skip the other three.
std::optional<std::string> CheckSkipPropagation(const CriteriaLabels& labels,
                                                bool well_formed);

}  // namespace qudeval::corpus

#endif  // QUDEVAL_CORPUS_LABELS_H_
