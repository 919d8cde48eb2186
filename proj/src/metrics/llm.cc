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


#include "qudeval/metrics/llm.h"

#include <spdlog/spdlog.h>

#include "qudeval/common/error.h"
#include "qudeval/llmgate/parse.h"
#include "qudeval/metrics/reffree.h"

namespace qudeval::metrics {

namespace {

// Names the parser may find in a reply, in option order.
const std::vector<std::string> kGivnOptionNames = {"No new concepts", "Answer leakage",
                                                   "Hallucination"};
const std::vector<std::string> kRelvOptionNames = {"fully grounded",
                                                   "Some parts of the question",
                                                   "not grounded at all"};

std::string Provenance(const Gateway& gateway, std::string_view template_id,
                       const llmgate::LlmResponse& response) {
  return "model:" + gateway.config().model + ";template:" + std::string(template_id) +
         ";key:" + response.cache_key;
}

MetricVerdict Verdict(const QudEdge& edge, std::string metric_id, Criterion c, std::string label,
                      std::string provenance) {
  MetricVerdict v;
  v.edge_id = edge.edge_id;
  v.metric_id = std::move(metric_id);
  v.criterion = c;
  v.label = std::move(label);
  v.provenance = std::move(provenance);
  return v;
}

}  // namespace

std::string LlmClassifyId(Criterion c, Shots shots) {
  if (c != Criterion::kGivn && c != Criterion::kRelv) {
    throw Error(ErrorCode::kUsage, "no classifier prompt for criterion " +
                                       std::string(corpus::CriterionName(c)));
  }
  return std::string("gpt-cls-") + (shots == Shots::kZero ? "zs-" : "fs-") +
         std::string(corpus::CriterionName(c));
}

std::string LlmScoreId(Criterion c) {
  if (c != Criterion::kComp && c != Criterion::kRelv) {
    throw Error(ErrorCode::kUsage,
                "no scoring prompt for criterion " + std::string(corpus::CriterionName(c)));
  }
  return "gpt-scr-" + std::string(corpus::CriterionName(c));
}

std::string NumberedContext(const Document& doc, int k) {
  std::string out;
  for (int i = 1; i <= k; ++i) {
    if (i > 1) out += '\n';
    out += std::to_string(i) + " " + doc.Sentence(i);
  }
  return out;
}

MetricVerdict LlmClassify(const QudEdge& edge, const Document& doc, Criterion c, Shots shots,
                          Gateway& gateway, const PromptLibrary& prompts) {
  const std::string id = LlmClassifyId(c, shots);
  if (!edge.well_formed()) return SkippedVerdict(edge, id, c);
  llmgate::Slots slots;
  slots["question"] = edge.question;
  if (c == Criterion::kGivn) {
    slots["context"] = NumberedContext(doc, edge.anchor_idx);
    slots["answer"] = doc.Sentence(edge.answer_idx);
  } else {
    slots["anchor"] = doc.Sentence(edge.anchor_idx);
  }
  const auto& names = c == Criterion::kGivn ? kGivnOptionNames : kRelvOptionNames;
  const std::string prompt = prompts.Render(id, slots);
  auto response = gateway.Complete(prompt);
  int option;
  try {
    option = llmgate::ParseOption(response.text, names);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnparseableResponse) throw;
    spdlog::warn("edge {}: unparseable {} reply, reprompting", edge.edge_id, id);
    response = gateway.Complete(prompts.Render(llmgate::kRepromptTemplate, {{"prompt", prompt}}));
    option = llmgate::ParseOption(response.text, names);
  }
  std::string label(corpus::CriterionLabels(c)[option - 1]);
  return Verdict(edge, id, c, std::move(label), Provenance(gateway, id, response));
}

MetricVerdict LlmScore(const QudEdge& edge, const Document& doc, Criterion c,
                       const MappingFunction& mapping, Gateway& gateway,
                       const PromptLibrary& prompts) {
  const std::string id = LlmScoreId(c);
  if (!edge.well_formed()) return SkippedVerdict(edge, id, c);
  llmgate::Slots slots;
  slots["question"] = edge.question;
  if (c == Criterion::kComp) {
    slots["article"] = doc.FullText();
    slots["answer"] = doc.Sentence(edge.answer_idx);
  } else {
    slots["anchor"] = doc.Sentence(edge.anchor_idx);
  }
  auto response = gateway.Complete(prompts.Render(id, slots));
  auto score = llmgate::ParseScore(response.text, 1.0, 100.0);
  std::string provenance = Provenance(gateway, id, response) + ";mapping:" + mapping.id();
  if (score.clamped) {
    spdlog::warn("edge {}: {} score {} clamped to {}", edge.edge_id, id, score.raw, score.value);
    provenance += ";clamped";
  }
  MetricVerdict v = Verdict(edge, id, c, mapping.Map(score.value), std::move(provenance));
  v.raw_score = score.value;
  return v;
}

int MatchSentence(const Document& doc, std::string_view reply, const textkit::Lexicons& lex) {
  const std::string wanted = textkit::NormalizeForMatch(reply, lex);
  if (!wanted.empty()) {
    for (int i = 1; i <= doc.size(); ++i) {
      if (textkit::NormalizeForMatch(doc.Sentence(i), lex) == wanted) return i;
    }
    for (int i = 1; i <= doc.size(); ++i) {
      std::string s = textkit::NormalizeForMatch(doc.Sentence(i), lex);
      if (!s.empty() && (" " + wanted + " ").find(" " + s + " ") != std::string::npos) return i;
    }
  }
  int best = 0;
  int best_overlap = 0;
  for (int i = 1; i <= doc.size(); ++i) {
    int overlap = textkit::UnigramOverlap(reply, doc.Sentence(i), lex);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = i;
    }
  }
  if (best == 0) {
    throw Error(ErrorCode::kNoSentenceMatch,
                "reply shares no word with any sentence of " + doc.doc_id);
  }
  return best;
}

GptAnsDetail GptAnsCompatibilityDetail(const QudEdge& edge, const Document& doc,
                                       Gateway& gateway, const textkit::Lexicons& lex,
                                       const PromptLibrary& prompts) {
  GptAnsDetail d;
  const std::string article = doc.FullText();
  auto answer = gateway.Complete(prompts.Render(
      llmgate::kGptAnsAnswerTemplate,
      {{"article", article}, {"anchor", doc.Sentence(edge.anchor_idx)}, {"question", edge.question}}));
  d.generated_answer = llmgate::FirstLine(answer.text, "answer");
  if (d.generated_answer.empty()) {
    throw Error(ErrorCode::kEmptyCompletion, "edge " + edge.edge_id + ": empty generated answer");
  }
  auto closest = gateway.Complete(prompts.Render(
      llmgate::kGptAnsClosestTemplate, {{"article", article}, {"answer", d.generated_answer}}));
  d.closest_reply = closest.text;
  d.matched_idx = MatchSentence(doc, closest.text, lex);
  d.label = d.matched_idx == edge.answer_idx ? kAnswered : kNotAnswered;
  return d;
}

MetricVerdict GptAnsCompatibility(const QudEdge& edge, const Document& doc, Gateway& gateway,
                                  const textkit::Lexicons& lex, const PromptLibrary& prompts) {
  if (!edge.well_formed()) return SkippedVerdict(edge, kGptAnsId, Criterion::kComp);
  auto d = GptAnsCompatibilityDetail(edge, doc, gateway, lex, prompts);
  MetricVerdict v = Verdict(edge, kGptAnsId, Criterion::kComp, d.label,
                            "model:" + gateway.config().model + ";matched:" +
                                std::to_string(d.matched_idx));
  v.raw_score = d.matched_idx;
  return v;
}

double LlmSimilarity(const QuestionPair& pair, const std::string& context, Gateway& gateway,
                     const PromptLibrary& prompts) {
  auto response = gateway.Complete(prompts.Render(
      llmgate::kSimilarityTemplate,
      {{"context", context}, {"reference", pair.reference}, {"candidate", pair.candidate}}));
  auto score = llmgate::ParseScore(response.text, 1.0, 5.0);
  if (score.clamped) {
    spdlog::warn("pair {}: similarity {} clamped to {}", pair.edge_id, score.raw, score.value);
  }
  return score.value;
}

}  // namespace qudeval::metrics
