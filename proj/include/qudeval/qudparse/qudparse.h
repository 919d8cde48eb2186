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


// Two-step QUD parsing with a chat model: generate the question an answer
// sentence addresses, then pick the earlier sentence it arises from.

#ifndef QUDEVAL_QUDPARSE_QUDPARSE_H_
#define QUDEVAL_QUDPARSE_QUDPARSE_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "qudeval/common/error.h"
#include "qudeval/corpus/corpus.h"
#include "qudeval/llmgate/gateway.h"
#include "qudeval/llmgate/prompts.h"
#include "qudeval/textkit/textkit.h"

namespace qudeval::qudparse {

using corpus::Document;
using corpus::QudEdge;

struct ParseStats {
  int duplicates = 0;          // questions equal to an earlier one in the run
  double duplicate_pct = 0.0;  // 100 * duplicates / edges
  double avg_len = 0.0;        // mean word tokens per question
  int ill_formed = 0;          // edges with anchor >= answer

  bool operator==(const ParseStats&) const = default;
};

struct EdgeFailure {
  int answer_idx = 0;
  ErrorCode code = ErrorCode::kProviderError;
  std::string message;
};

struct ParseRun {
  std::string doc_id;
  std::vector<QudEdge> edges;  // one per answer index that parsed
  ParseStats stats;
  std::string model;
  std::vector<std::string> template_ids;
  std::vector<EdgeFailure> failures;
};

// Lowercased, whitespace-collapsed form used for duplicate detection.
std::string NormalizeQuestion(std::string_view question);

ParseStats ComputeStats(const std::vector<QudEdge>& edges,
                        const textkit::Lexicons& lex = textkit::Lexicons::Default());

// {"duplicates","duplicate_pct","avg_len","ill_formed"}
nlohmann::ordered_json StatsToJson(const ParseStats& stats);

struct AnchorChoice {
  int index = 0;
  bool exact = false;  // the reply reproduced the sentence
};

// Maps a free-text anchor reply to a sentence index. Sentences before the
// answer are tried first, then later ones, then the answer itself; within
// each group an exact match wins over the highest unigram overlap (lowest
// index on ties). Throws NoAnchorMatch when nothing overlaps.
AnchorChoice MatchAnchor(const Document& doc, int answer_idx, std::string_view reply,
                         const textkit::Lexicons& lex = textkit::Lexicons::Default());

class QudParser {
 public:
  QudParser(llmgate::Gateway& gateway, corpus::System system,
            const textkit::Lexicons& lex = textkit::Lexicons::Default(),
            const llmgate::PromptLibrary& prompts = llmgate::PromptLibrary::Default());

  // Requires 2 <= answer_idx <= n (IndexOutOfRange). Returns the first
  // non-empty line of the completion without a "Question:" prefix; throws
  // EmptyCompletion when there is none.
  std::string GenerateQuestion(const Document& doc, int answer_idx) const;

  // Asks for the anchor sentence and matches the reply with MatchAnchor.
  AnchorChoice SelectAnchor(const Document& doc, int answer_idx,
                            const std::string& question) const;

  // Both steps for every index. Indices that fail are reported in
  // `failures` and produce no edge; the run itself never aborts. Edge ids
  // are "<doc_id>:<system>:<answer_idx>".
  ParseRun ParseDocument(const Document& doc, const std::vector<int>& answer_indices) const;

 private:
  llmgate::Gateway& gateway_;
  corpus::System system_;
  const textkit::Lexicons& lex_;
  const llmgate::PromptLibrary& prompts_;
};

}  // namespace qudeval::qudparse

#endif  // QUDEVAL_QUDPARSE_QUDPARSE_H_
