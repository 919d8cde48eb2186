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


// Metrics that query a chat model through llmgate: option classifiers,
// 1-100 scorers with a mapping function, the two-step answer check, and
// 1-5 question similarity.

#ifndef QUDEVAL_METRICS_LLM_H_
#define QUDEVAL_METRICS_LLM_H_

#include <string>

#include "qudeval/corpus/corpus.h"
#include "qudeval/llmgate/gateway.h"
#include "qudeval/llmgate/prompts.h"
#include "qudeval/metrics/mapping.h"
#include "qudeval/metrics/refbased.h"
#include "qudeval/textkit/textkit.h"

namespace qudeval::metrics {

using corpus::Document;
using corpus::QudEdge;
using llmgate::Gateway;
using llmgate::PromptLibrary;

enum class Shots { kZero, kFew };

inline constexpr char kGptAnsId[] = "gpt-ans";
inline constexpr char kLlmSimilarityId[] = "llm-sim";

// "gpt-cls-zs-givn", "gpt-cls-fs-relv", ... Only givn and relv have
// classifier prompts; other criteria throw Usage.
std::string LlmClassifyId(Criterion c, Shots shots);
// "gpt-scr-comp" or "gpt-scr-relv"; other criteria throw Usage.
std::string LlmScoreId(Criterion c);

// Numbered question context ("1 <S1>\n2 <S2>...") as the classifier
// prompts show it.
std::string NumberedContext(const Document& doc, int k);

// Renders the criterion's classifier prompt and parses the selected option.
// An unparseable reply gets one stricter reprompt before
// UnparseableResponse is thrown.
MetricVerdict LlmClassify(const QudEdge& edge, const Document& doc, Criterion c, Shots shots,
                          Gateway& gateway,
                          const PromptLibrary& prompts = PromptLibrary::Default());

// Asks for a 1-100 score and maps it. Scores outside [1, 100] are clamped
// with a warning and the provenance notes "clamped". Throws
// NonNumericResponse.
MetricVerdict LlmScore(const QudEdge& edge, const Document& doc, Criterion c,
                       const MappingFunction& mapping, Gateway& gateway,
                       const PromptLibrary& prompts = PromptLibrary::Default());

// Index of the article sentence a model reply refers to: the sentence
// whose normalized text equals the reply (or is contained in it), else the
// one with the highest unigram overlap, lowest index on ties. Throws
// NoSentenceMatch when nothing overlaps.
int MatchSentence(const Document& doc, std::string_view reply,
                  const textkit::Lexicons& lex = textkit::Lexicons::Default());

struct GptAnsDetail {
  std::string generated_answer;
  std::string closest_reply;
  int matched_idx = 0;
  std::string label;  // answered or not_answered
};

// Step 1 answers the question from the article and anchor; step 2 asks
// which article sentence is closest to that answer. Matching S_a means
// answered.
GptAnsDetail GptAnsCompatibilityDetail(const QudEdge& edge, const Document& doc,
                                       Gateway& gateway,
                                       const textkit::Lexicons& lex = textkit::Lexicons::Default(),
                                       const PromptLibrary& prompts = PromptLibrary::Default());
MetricVerdict GptAnsCompatibility(const QudEdge& edge, const Document& doc, Gateway& gateway,
                                  const textkit::Lexicons& lex = textkit::Lexicons::Default(),
                                  const PromptLibrary& prompts = PromptLibrary::Default());

// Similarity of candidate to reference in [1, 5] given the context text.
// Out-of-range replies are clamped with a warning. Throws
// NonNumericResponse.
double LlmSimilarity(const QuestionPair& pair, const std::string& context, Gateway& gateway,
                     const PromptLibrary& prompts = PromptLibrary::Default());

}  // namespace qudeval::metrics

#endif  // QUDEVAL_METRICS_LLM_H_
