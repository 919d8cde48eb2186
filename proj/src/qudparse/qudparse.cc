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


#include "qudeval/qudparse/qudparse.h"

#include <cctype>
#include <future>
#include <set>

#include "qudeval/llmgate/parse.h"

namespace qudeval::qudparse {

namespace {

std::string Preceding(const Document& doc, int answer_idx) {
  std::string out;
  for (int i = 1; i < answer_idx; ++i) {
    if (i > 1) out += ' ';
    out += doc.Sentence(i);
  }
  return out;
}

void CheckAnswerIndex(const Document& doc, int answer_idx) {
  if (answer_idx < 2 || answer_idx > doc.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "answer index " + std::to_string(answer_idx) + " outside 2.." +
                    std::to_string(doc.size()) + " of " + doc.doc_id);
  }
}

}  // namespace

std::string NormalizeQuestion(std::string_view question) {
  std::string out;
  bool space = false;
  for (unsigned char c : question) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

ParseStats ComputeStats(const std::vector<QudEdge>& edges, const textkit::Lexicons& lex) {
  ParseStats s;
  std::set<std::string> seen;
  long tokens = 0;
  for (const auto& e : edges) {
    if (!seen.insert(NormalizeQuestion(e.question)).second) ++s.duplicates;
    for (const auto& t : textkit::Tokenize(e.question, lex)) {
      if (!t.Has(textkit::Tag::kPunct)) ++tokens;
    }
    if (!e.well_formed()) ++s.ill_formed;
  }
  if (!edges.empty()) {
    double n = static_cast<double>(edges.size());
    s.duplicate_pct = 100.0 * s.duplicates / n;
    s.avg_len = static_cast<double>(tokens) / n;
  }
  return s;
}

nlohmann::ordered_json StatsToJson(const ParseStats& stats) {
  nlohmann::ordered_json j;
  j["duplicates"] = stats.duplicates;
  j["duplicate_pct"] = stats.duplicate_pct;
  j["avg_len"] = stats.avg_len;
  j["ill_formed"] = stats.ill_formed;
  return j;
}

AnchorChoice MatchAnchor(const Document& doc, int answer_idx, std::string_view reply,
                         const textkit::Lexicons& lex) {
  std::string line = llmgate::FirstLine(reply, "Anchor Sentence");
  if (line.empty()) line = std::string(reply);
  const std::string wanted = textkit::NormalizeForMatch(line, lex);

  std::vector<std::vector<int>> groups(3);
  for (int i = 1; i <= doc.size(); ++i) {
    groups[i < answer_idx ? 0 : (i > answer_idx ? 1 : 2)].push_back(i);
  }
  for (const auto& group : groups) {
    for (int i : group) {
      if (!wanted.empty() && textkit::NormalizeForMatch(doc.Sentence(i), lex) == wanted) {
        return {i, true};
      }
    }
    int best = 0;
    int best_overlap = 0;
    for (int i : group) {
      int overlap = textkit::UnigramOverlap(line, doc.Sentence(i), lex);
      if (overlap > best_overlap) {
        best_overlap = overlap;
        best = i;
      }
    }
    if (best > 0) return {best, false};
  }
  throw Error(ErrorCode::kNoAnchorMatch,
              "anchor reply matches no sentence of " + doc.doc_id + ": \"" + line + "\"");
}

QudParser::QudParser(llmgate::Gateway& gateway, corpus::System system,
                     const textkit::Lexicons& lex, const llmgate::PromptLibrary& prompts)
    : gateway_(gateway), system_(std::move(system)), lex_(lex), prompts_(prompts) {}

std::string QudParser::GenerateQuestion(const Document& doc, int answer_idx) const {
  CheckAnswerIndex(doc, answer_idx);
  auto response = gateway_.Complete(prompts_.Render(
      llmgate::kQuestionGenTemplate,
      {{"context", Preceding(doc, answer_idx)}, {"answer", doc.Sentence(answer_idx)}}));
  std::string question = llmgate::FirstLine(response.text, "Question");
  if (question.empty()) {
    throw Error(ErrorCode::kEmptyCompletion, "empty question for sentence " +
                                                 std::to_string(answer_idx) + " of " + doc.doc_id);
  }
  return question;
}

AnchorChoice QudParser::SelectAnchor(const Document& doc, int answer_idx,
                                     const std::string& question) const {
  CheckAnswerIndex(doc, answer_idx);
  auto response = gateway_.Complete(prompts_.Render(llmgate::kAnchorTemplate,
                                                    {{"context", Preceding(doc, answer_idx)},
                                                     {"answer", doc.Sentence(answer_idx)},
                                                     {"question", question}}));
  return MatchAnchor(doc, answer_idx, response.text, lex_);
}

ParseRun QudParser::ParseDocument(const Document& doc,
                                  const std::vector<int>& answer_indices) const {
  ParseRun run;
  run.doc_id = doc.doc_id;
  run.model = gateway_.config().model;
  run.template_ids = {llmgate::kQuestionGenTemplate, llmgate::kAnchorTemplate};

  // Steps for different sentences run concurrently; the gateway bounds the
  // number of requests actually in flight.
  std::vector<std::future<QudEdge>> pending;
  for (int a : answer_indices) {
    pending.push_back(std::async(std::launch::async, [this, &doc, a] {
      QudEdge e;
      e.doc_id = doc.doc_id;
      e.system = system_;
      e.answer_idx = a;
      e.edge_id = doc.doc_id + ":" + system_.ToString() + ":" + std::to_string(a);
      e.question = GenerateQuestion(doc, a);
      e.anchor_idx = SelectAnchor(doc, a, e.question).index;
      return e;
    }));
  }
  for (size_t i = 0; i < pending.size(); ++i) {
    try {
      run.edges.push_back(pending[i].get());
    } catch (const Error& e) {
      run.failures.push_back({answer_indices[i], e.code(), e.what()});
    }
  }
  run.stats = ComputeStats(run.edges, lex_);
  return run;
}

}  // namespace qudeval::qudparse
