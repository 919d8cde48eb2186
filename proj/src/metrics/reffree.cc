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

#include "qudeval/metrics/reffree.h"

#include "qudeval/common/error.h"
#include "qudeval/common/files.h"
#include "qudeval/metrics/refbased.h"

namespace qudeval::metrics {

namespace {

using corpus::GivnLabel;
using corpus::RelvLabel;
using textkit::Tag;

std::set<std::string> WordLemmas(const std::string& text, const textkit::Lexicons& lex) {
  auto lemmas = textkit::AllLemmas(textkit::Tokenize(text, lex));
  return {lemmas.begin(), lemmas.end()};
}

std::string LexiconProvenance(const textkit::Lexicons& lex) { return "lexicon:" + lex.hash(); }

// Shared tail of the lexical and information-status givenness rules.
GivnLabel ClassifyNew(const std::set<std::string>& candidates,
                      const std::vector<std::string>& context, const std::string& answer,
                      const textkit::Lexicons& lex, GivennessDetail* detail) {
  std::set<std::string> given;
  for (const auto& s : context) given.merge(WordLemmas(s, lex));
  auto in_answer = WordLemmas(answer, lex);
  for (const auto& l : candidates) {
    if (given.count(l)) continue;
    detail->new_lemmas.insert(l);
    if (in_answer.count(l)) detail->answer_only.insert(l);
  }
  if (detail->new_lemmas.empty()) return GivnLabel::kNoNew;
  if (detail->answer_only.size() == detail->new_lemmas.size()) return GivnLabel::kAnswerLeak;
  return GivnLabel::kHallucination;
}

MetricVerdict MakeVerdict(const QudEdge& edge, std::string metric_id, Criterion c,
                          std::string label, std::string provenance) {
  MetricVerdict v;
  v.edge_id = edge.edge_id;
  v.metric_id = std::move(metric_id);
  v.criterion = c;
  v.label = std::move(label);
  v.provenance = std::move(provenance);
  return v;
}

InfoStatus ParseStatus(const std::string& s) {
  if (s == "new") return InfoStatus::kNew;
  if (s == "old") return InfoStatus::kOld;
  if (s == "mediated") return InfoStatus::kMediated;
  throw Error(ErrorCode::kSchemaViolation, "unknown information status \"" + s + "\"");
}

}  // namespace

MetricVerdict SkippedVerdict(const QudEdge& edge, std::string metric_id, Criterion c) {
  return MakeVerdict(edge, std::move(metric_id), c, std::string(corpus::kSkippedName), "");
}

GivennessDetail GivennessRuleDetail(const std::string& question,
                                    const std::vector<std::string>& context,
                                    const std::string& answer, const textkit::Lexicons& lex) {
  GivennessDetail d;
  d.question_lemmas = textkit::ContentLemmaSet(question, lex);
  d.label = ClassifyNew(d.question_lemmas, context, answer, lex, &d);
  return d;
}

MetricVerdict GivennessRule(const QudEdge& edge, const Document& doc,
                            const textkit::Lexicons& lex) {
  if (!edge.well_formed()) return SkippedVerdict(edge, kGivennessRuleId, Criterion::kGivn);
  auto d = GivennessRuleDetail(edge.question, corpus::ContextOf(doc, edge.anchor_idx),
                               doc.Sentence(edge.answer_idx), lex);
  corpus::CriteriaLabels labels;
  labels.givn = d.label;
  return MakeVerdict(edge, kGivennessRuleId, Criterion::kGivn,
                     std::string(labels.Name(Criterion::kGivn)), LexiconProvenance(lex));
}

RelevanceDetail RelevanceRuleDetail(const std::string& question, const std::string& anchor,
                                    const textkit::Lexicons& lex) {
  RelevanceDetail d;
  std::vector<textkit::Token> focus_tokens;
  try {
    auto np = textkit::MaxNounPhrase(question, lex);
    d.focus_text = np.text;
    focus_tokens = np.tokens;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoNounPhrase) throw;
    d.used_fallback = true;
    d.focus_text = question;
    focus_tokens = textkit::Tokenize(question, lex);
  }
  for (const auto& t : focus_tokens) {
    if (t.Has(Tag::kContent)) d.focus_lemmas.insert(t.lemma);
  }
  std::set<std::string> anchor_lemmas;
  for (const auto& t : textkit::Tokenize(anchor, lex)) {
    if (t.Has(Tag::kContent)) anchor_lemmas.insert(t.lemma);
  }
  for (const auto& l : d.focus_lemmas) {
    if (anchor_lemmas.count(l)) d.grounded.insert(l);
  }
  if (d.focus_lemmas.empty()) {
    d.label = RelvLabel::kPartially;
  } else if (d.grounded.size() == d.focus_lemmas.size()) {
    d.label = RelvLabel::kFully;
  } else if (d.grounded.empty()) {
    d.label = RelvLabel::kNotGrounded;
  } else {
    d.label = RelvLabel::kPartially;
  }
  return d;
}

MetricVerdict RelevanceRule(const QudEdge& edge, const Document& doc,
                            const textkit::Lexicons& lex) {
  if (!edge.well_formed()) return SkippedVerdict(edge, kRelevanceRuleId, Criterion::kRelv);
  auto d = RelevanceRuleDetail(edge.question, doc.Sentence(edge.anchor_idx), lex);
  corpus::CriteriaLabels labels;
  labels.relv = d.label;
  return MakeVerdict(edge, kRelevanceRuleId, Criterion::kRelv,
                     std::string(labels.Name(Criterion::kRelv)), LexiconProvenance(lex));
}

MetricVerdict Bleu1SimRelevance(const QudEdge& edge, const Document& doc,
                                const MappingFunction& mapping, const textkit::Lexicons& lex) {
  if (!edge.well_formed()) return SkippedVerdict(edge, kBleu1SimId, Criterion::kRelv);
  double s = Bleu1(edge.question, doc.Sentence(edge.anchor_idx), lex);
  MetricVerdict v = MakeVerdict(edge, kBleu1SimId, Criterion::kRelv, mapping.Map(s),
                                LexiconProvenance(lex) + ";mapping:" + mapping.id());
  v.raw_score = s;
  return v;
}

FileInfoStatusProvider::FileInfoStatusProvider(const std::filesystem::path& path)
    : name_("file:" + path.filename().string()) {
  ForEachJsonLine(path, [&](const nlohmann::json& record, int line) {
    try {
      std::vector<Mention> mentions;
      for (const auto& m : record.at("mentions")) {
        mentions.push_back({m.at("text").get<std::string>(),
                            ParseStatus(m.at("status").get<std::string>())});
      }
      by_edge_[record.at("edge_id").get<std::string>()] = std::move(mentions);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation,
                  path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
  });
}

std::vector<Mention> FileInfoStatusProvider::Classify(const QudEdge& edge, const Document&) {
  auto it = by_edge_.find(edge.edge_id);
  if (it == by_edge_.end()) {
    throw Error(ErrorCode::kSchemaViolation,
                "no information-status labels for edge " + edge.edge_id);
  }
  return it->second;
}

MetricVerdict InfoStatusGivenness(const QudEdge& edge, const Document& doc,
                                  InfoStatusProvider& provider, const textkit::Lexicons& lex) {
  if (!edge.well_formed()) return SkippedVerdict(edge, kInfoStatusId, Criterion::kGivn);
  std::set<std::string> candidates;
  for (const auto& m : provider.Classify(edge, doc)) {
    if (m.status != InfoStatus::kNew) continue;
    auto lemmas = textkit::ContentLemmas(m.text, lex, {.starts_sentence = false});
    candidates.insert(lemmas.begin(), lemmas.end());
  }
  GivennessDetail d;
  GivnLabel label = ClassifyNew(candidates, corpus::ContextOf(doc, edge.anchor_idx),
                                doc.Sentence(edge.answer_idx), lex, &d);
  corpus::CriteriaLabels labels;
  labels.givn = label;
  return MakeVerdict(edge, kInfoStatusId, Criterion::kGivn,
                     std::string(labels.Name(Criterion::kGivn)),
                     provider.name() + ";" + LexiconProvenance(lex));
}

}  // namespace qudeval::metrics
