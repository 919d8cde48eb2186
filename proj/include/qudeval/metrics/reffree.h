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

// Reference-free metrics that need no model: lexical givenness and anchor
// relevance rules, BLEU1-sim, and the information-status adapter.

#ifndef QUDEVAL_METRICS_REFFREE_H_
#define QUDEVAL_METRICS_REFFREE_H_

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qudeval/corpus/corpus.h"
#include "qudeval/metrics/mapping.h"
#include "qudeval/textkit/textkit.h"

namespace qudeval::metrics {

using corpus::Document;
using corpus::QudEdge;

inline constexpr char kGivennessRuleId[] = "givenness-rule";
inline constexpr char kRelevanceRuleId[] = "relevance-rule";
inline constexpr char kBleu1SimId[] = "bleu1-sim";
inline constexpr char kInfoStatusId[] = "info-status";

// Verdict with label "skipped" for an ill-formed edge.
MetricVerdict SkippedVerdict(const QudEdge& edge, std::string metric_id, Criterion c);

struct GivennessDetail {
  std::set<std::string> question_lemmas;  // content lemmas of the question, names excluded
  std::set<std::string> new_lemmas;       // ... absent from the question context
  std::set<std::string> answer_only;      // ... of those, present in the answer sentence
  corpus::GivnLabel label = corpus::GivnLabel::kNoNew;
};

// New := question lemmas missing from every word of S_1..S_k. Empty ->
// no_new; all found in S_a -> answer_leak; otherwise hallucination.
GivennessDetail GivennessRuleDetail(const std::string& question,
                                    const std::vector<std::string>& context,
                                    const std::string& answer,
                                    const textkit::Lexicons& lex = textkit::Lexicons::Default());
MetricVerdict GivennessRule(const QudEdge& edge, const Document& doc,
                            const textkit::Lexicons& lex = textkit::Lexicons::Default());

struct RelevanceDetail {
  std::string focus_text;           // the maximal NP, or the whole question
  bool used_fallback = false;       // no NP found
  std::set<std::string> focus_lemmas;
  std::set<std::string> grounded;   // focus lemmas found in the anchor
  corpus::RelvLabel label = corpus::RelvLabel::kPartially;
};

// Focus := content lemmas (names included) of the question's maximal NP,
// falling back to the whole question. All in the anchor -> fully, none ->
// not_grounded, otherwise (or an empty focus) partially.
RelevanceDetail RelevanceRuleDetail(const std::string& question, const std::string& anchor,
                                    const textkit::Lexicons& lex = textkit::Lexicons::Default());
MetricVerdict RelevanceRule(const QudEdge& edge, const Document& doc,
                            const textkit::Lexicons& lex = textkit::Lexicons::Default());

// BLEU-1 of the question against the anchor sentence, mapped through
// `mapping` (default bands: >0.05 fully, 0.01..0.05 partially).
MetricVerdict Bleu1SimRelevance(const QudEdge& edge, const Document& doc,
                                const MappingFunction& mapping = MappingFunction::Bleu1SimDefault(),
                                const textkit::Lexicons& lex = textkit::Lexicons::Default());

// Information status of a mention in the question, from an external
// classifier.
enum class InfoStatus { kNew, kOld, kMediated };

struct Mention {
  std::string text;
  InfoStatus status = InfoStatus::kNew;
};

class InfoStatusProvider {
 public:
  virtual ~InfoStatusProvider() = default;
  virtual std::string name() const = 0;
  // Mentions of the edge's question with their status.
  virtual std::vector<Mention> Classify(const QudEdge& edge, const Document& doc) = 0;
};

// Reads precomputed labels from JSON lines:
//   {"edge_id": "...", "mentions": [{"text": "...", "status": "new|old|mediated"}]}
class FileInfoStatusProvider : public InfoStatusProvider {
 public:
  explicit FileInfoStatusProvider(const std::filesystem::path& path);
  std::string name() const override { return name_; }
  // Throws SchemaViolation when the edge has no entry.
  std::vector<Mention> Classify(const QudEdge& edge, const Document& doc) override;

 private:
  std::string name_;
  std::map<std::string, std::vector<Mention>> by_edge_;
};

// Old and mediated mentions count as given. Content lemmas of the new
// mentions then go through the lexical givenness rule.
MetricVerdict InfoStatusGivenness(const QudEdge& edge, const Document& doc,
                                  InfoStatusProvider& provider,
                                  const textkit::Lexicons& lex = textkit::Lexicons::Default());

}  // namespace qudeval::metrics

#endif  // QUDEVAL_METRICS_REFFREE_H_
