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

#include "qudeval/corpus/labels.h"

#include <array>

namespace qudeval::corpus {

namespace {

constexpr std::array<std::string_view, 2> kLangNames = {"pass", "fail"};
constexpr std::array<std::string_view, 3> kCompNames = {
    "direct", "unfocused", "not_answered"};
constexpr std::array<std::string_view, 3> kGivnNames = {
    "no_new", "answer_leak", "hallucination"};
constexpr std::array<std::string_view, 3> kRelvNames = {
    "fully", "partially", "not_grounded"};

template <typename Enum>
std::optional<int> RankOf(Enum value) {
  if (value == Enum::kSkipped) return std::nullopt;
  return static_cast<int>(value);
}

template <typename Enum>
bool SetFromName(Enum* out, Criterion c, std::string_view name) {
  if (name == kSkippedName) {
    *out = Enum::kSkipped;
    return true;
  }
  auto rank = LabelRank(c, name);
  if (!rank) return false;
  *out = static_cast<Enum>(*rank);
  return true;
}

}  // namespace

std::string_view CriterionName(Criterion c) {
  switch (c) {
    case Criterion::kLang: return "lang";
    case Criterion::kComp: return "comp";
    case Criterion::kGivn: return "givn";
    case Criterion::kRelv: return "relv";
  }
  return "";
}

std::optional<Criterion> ParseCriterion(std::string_view name) {
  for (Criterion c : kAllCriteria) {
    if (CriterionName(c) == name) return c;
  }
  return std::nullopt;
}

std::span<const std::string_view> CriterionLabels(Criterion c) {
  switch (c) {
    case Criterion::kLang: return kLangNames;
    case Criterion::kComp: return kCompNames;
    case Criterion::kGivn: return kGivnNames;
    case Criterion::kRelv: return kRelvNames;
  }
  return {};
}

std::optional<int> LabelRank(Criterion c, std::string_view label) {
  auto names = CriterionLabels(c);
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<int> CriteriaLabels::Rank(Criterion c) const {
  switch (c) {
    case Criterion::kLang: return RankOf(lang);
    case Criterion::kComp: return RankOf(comp);
    case Criterion::kGivn: return RankOf(givn);
    case Criterion::kRelv: return RankOf(relv);
  }
  return std::nullopt;
}

std::string_view CriteriaLabels::Name(Criterion c) const {
  auto rank = Rank(c);
  if (!rank) return kSkippedName;
  return CriterionLabels(c)[*rank];
}

bool CriteriaLabels::Set(Criterion c, std::string_view name) {
  switch (c) {
    case Criterion::kLang: return SetFromName(&lang, c, name);
    case Criterion::kComp: return SetFromName(&comp, c, name);
    case Criterion::kGivn: return SetFromName(&givn, c, name);
    case Criterion::kRelv: return SetFromName(&relv, c, name);
  }
  return false;
}

std::optional<std::string> CheckSkipPropagation(const CriteriaLabels& labels,
                                                bool well_formed) {
  if (!well_formed && labels != CriteriaLabels::AllSkipped()) {
    return "ill-formed edge (anchor_idx >= answer_idx) must be skipped on "
           "every criterion";
  }
  if (labels.lang != LangLabel::kPass) {
    for (Criterion c : kMetricCriteria) {
      if (labels.Rank(c)) {
        return "lang=" + std::string(labels.Name(Criterion::kLang)) +
               " requires " + std::string(CriterionName(c)) +
               "=skipped, got " + std::string(labels.Name(c));
      }
    }
  }
  return std::nullopt;
}

}  // namespace qudeval::corpus
