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

#ifndef QUDEVAL_CORPUS_CORPUS_H_
#define QUDEVAL_CORPUS_CORPUS_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qudeval/corpus/labels.h"

namespace qudeval::corpus {

enum class SplitTag { kValidation, kTest, kTrainHeldOut, kUnassigned };

std::string_view SplitTagName(SplitTag tag);
std::optional<SplitTag> ParseSplitTag(std::string_view name);

struct SentenceRecord {
  int index = 0;  // 1-based
  std::string text;

  bool operator==(const SentenceRecord&) const = default;
};

struct Document {
  std::string doc_id;
  std::vector<SentenceRecord> sentences;
  SplitTag split_tag = SplitTag::kUnassigned;

  int size() const { return static_cast<int>(sentences.size()); }
  // Text of the 1-based sentence `k`. Throws IndexOutOfRange.
  const std::string& Sentence(int k) const;
  // All sentence texts joined by single spaces.
  std::string FullText() const;
};

// Builds a document from plain sentence strings, numbering them from 1.
Document MakeDocument(std::string doc_id, std::vector<std::string> sentences,
                      SplitTag tag = SplitTag::kUnassigned);

// Producing system of an edge: one of the known parsers, the crowdsourced
// DCQA questions, or "custom:<name>".
class System {
 public:
  enum class Kind { kKoEtAl, kChatGpt, kAlpaca, kGpt4, kDcqaHuman, kCustom };

  System() = default;
  explicit System(Kind kind) : kind_(kind) {}
  static System Custom(std::string name);
  static std::optional<System> Parse(std::string_view text);

  Kind kind() const { return kind_; }
  std::string ToString() const;
  bool is_machine() const { return kind_ != Kind::kDcqaHuman; }

  bool operator==(const System&) const = default;
  auto operator<=>(const System&) const = default;

 private:
  Kind kind_ = Kind::kKoEtAl;
  std::string custom_name_;
};

struct QudEdge {
  std::string edge_id;
  std::string doc_id;
  std::string question;
  int anchor_idx = 0;
  int answer_idx = 0;
  System system;

  // An edge must point backwards; k >= a is retained but never evaluated.
  bool well_formed() const { return anchor_idx < answer_idx; }
};

struct AnnotationRecord {
  std::string edge_id;
  std::string annotator_id;
  CriteriaLabels labels;
  std::string comment;
  std::chrono::sys_seconds timestamp{};
};

struct SimilarityRecord {
  std::string edge_id;
  std::string reference_question;
  std::string annotator_id;
  double score = 0.0;  // [1, 5]
};

// "2024-01-31T12:00:00Z" <-> sys_seconds.
std::string FormatTimestamp(std::chrono::sys_seconds t);
std::optional<std::chrono::sys_seconds> ParseTimestamp(std::string_view text);

// One labels.jsonl line. FromJson throws SchemaViolation on a missing
// field, an invalid label name or a bad timestamp; it does not check skip
// propagation, which needs the edge.
nlohmann::ordered_json AnnotationToJson(const AnnotationRecord& record);
AnnotationRecord AnnotationFromJson(const nlohmann::json& record);

// One edges.jsonl line.
nlohmann::ordered_json EdgeToJson(const QudEdge& edge);

// Validated in-memory corpus. Immutable after load; call Reindex() after
// editing the vectors directly.
class Corpus {
 public:
  std::vector<Document> documents;
  std::vector<QudEdge> edges;
  std::vector<AnnotationRecord> annotations;
  std::vector<SimilarityRecord> similarities;

  void Reindex();

  const Document* FindDocument(std::string_view doc_id) const;
  const QudEdge* FindEdge(std::string_view edge_id) const;
  // Throws DanglingDocId when the edge's document is missing.
  const Document& DocumentOf(const QudEdge& edge) const;
  // Annotation records of one edge in store order.
  std::vector<const AnnotationRecord*> AnnotationsOf(
      std::string_view edge_id) const;

  std::map<std::string, int> EdgeCountsBySystem() const;
  int machine_edge_count() const;

 private:
  std::unordered_map<std::string, size_t> doc_index_;
  std::unordered_map<std::string, size_t> edge_index_;
  std::unordered_map<std::string, std::vector<size_t>> annotations_by_edge_;
};

// Loads documents.jsonl, edges.jsonl and, when present, labels.jsonl and
// similarity.jsonl from `dir`. Labels of ill-formed edges are forced to
// skipped; every other invariant violation is an Error naming file and line.
Corpus LoadCorpus(const std::filesystem::path& dir);

// Inverse of LoadCorpus. Records are written in stored order with the
// documented field order, so LoadCorpus followed by WriteCorpus reproduces a
// canonical input byte for byte.
void WriteCorpus(const Corpus& corpus, const std::filesystem::path& dir);

// The question context of an edge anchored at `k`: sentences 1..k.
std::vector<std::string> ContextOf(const Document& document, int k);

// Partitions by article. The first corpus holds the named articles with all
// their edges and labels; the second holds everything else.
std::pair<Corpus, Corpus> SplitValidation(
    const Corpus& corpus, std::span<const std::string> article_ids);

// Documents tagged train-held-out: the articles used for annotator training,
// which double as the metric validation set.
std::vector<std::string> HeldOutArticleIds(const Corpus& corpus);

// One label set per edge. An annotator named "adjudicated" (or "gold") wins;
// otherwise each criterion takes the majority label across annotators, ties
// going to the label of the alphabetically first annotator among the tied.
// A failed or skipped majority language label skips the other criteria.
std::map<std::string, CriteriaLabels> GoldLabels(const Corpus& corpus);

// Human reference question for each machine edge: the dcqa-human question
// answered by the same sentence of the same document, else the first
// similarity record naming the edge. Edges with neither are absent.
std::map<std::string, std::string> ReferenceQuestions(const Corpus& corpus);

}  // namespace qudeval::corpus

#endif  // QUDEVAL_CORPUS_CORPUS_H_
