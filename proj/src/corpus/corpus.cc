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

#include "qudeval/corpus/corpus.h"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <set>
#include <unordered_set>

#include "json.hpp"
#include "qudeval/common/error.h"
#include "qudeval/common/files.h"

namespace qudeval::corpus {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Location prefix for error messages.
struct Where {
  const fs::path& file;
  int line;

  std::string str() const { return file.string() + ":" + std::to_string(line); }
};

[[noreturn]] void Fail(ErrorCode code, const Where& at, const std::string& m) {
  throw Error(code, at.str() + ": " + m);
}

const json& Field(const json& record, const char* key, const Where& at) {
  if (!record.is_object()) Fail(ErrorCode::kSchemaViolation, at, "not an object");
  auto it = record.find(key);
  if (it == record.end()) {
    Fail(ErrorCode::kSchemaViolation, at, std::string("missing field \"") + key + "\"");
  }
  return *it;
}

std::string StringField(const json& record, const char* key, const Where& at,
                        bool allow_empty = false) {
  const json& value = Field(record, key, at);
  if (!value.is_string()) {
    Fail(ErrorCode::kSchemaViolation, at, std::string("\"") + key + "\" must be a string");
  }
  std::string s = value.get<std::string>();
  if (s.empty() && !allow_empty) {
    Fail(ErrorCode::kSchemaViolation, at, std::string("\"") + key + "\" is empty");
  }
  return s;
}

int IntField(const json& record, const char* key, const Where& at) {
  const json& value = Field(record, key, at);
  if (!value.is_number_integer()) {
    Fail(ErrorCode::kSchemaViolation, at, std::string("\"") + key + "\" must be an integer");
  }
  return value.get<int>();
}

}  // namespace

std::string_view SplitTagName(SplitTag tag) {
  switch (tag) {
    case SplitTag::kValidation: return "validation";
    case SplitTag::kTest: return "test";
    case SplitTag::kTrainHeldOut: return "train-held-out";
    case SplitTag::kUnassigned: return "unassigned";
  }
  return "";
}

std::optional<SplitTag> ParseSplitTag(std::string_view name) {
  for (SplitTag t : {SplitTag::kValidation, SplitTag::kTest,
                     SplitTag::kTrainHeldOut, SplitTag::kUnassigned}) {
    if (SplitTagName(t) == name) return t;
  }
  return std::nullopt;
}

const std::string& Document::Sentence(int k) const {
  if (k < 1 || k > size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "sentence " + std::to_string(k) + " not in " + doc_id +
                    " (1.." + std::to_string(size()) + ")");
  }
  return sentences[k - 1].text;
}

std::string Document::FullText() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

Document MakeDocument(std::string doc_id, std::vector<std::string> sentences,
                      SplitTag tag) {
  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.split_tag = tag;
  int index = 1;
  for (auto& text : sentences) doc.sentences.push_back({index++, std::move(text)});
  return doc;
}

System System::Custom(std::string name) {
  System s(Kind::kCustom);
  s.custom_name_ = std::move(name);
  return s;
}

std::optional<System> System::Parse(std::string_view text) {
  if (text == "ko-etal") return System(Kind::kKoEtAl);
  if (text == "chatgpt") return System(Kind::kChatGpt);
  if (text == "alpaca") return System(Kind::kAlpaca);
  if (text == "gpt4") return System(Kind::kGpt4);
  if (text == "dcqa-human") return System(Kind::kDcqaHuman);
  constexpr std::string_view kPrefix = "custom:";
  if (text.starts_with(kPrefix) && text.size() > kPrefix.size()) {
    return Custom(std::string(text.substr(kPrefix.size())));
  }
  return std::nullopt;
}

std::string System::ToString() const {
  switch (kind_) {
    case Kind::kKoEtAl: return "ko-etal";
    case Kind::kChatGpt: return "chatgpt";
    case Kind::kAlpaca: return "alpaca";
    case Kind::kGpt4: return "gpt4";
    case Kind::kDcqaHuman: return "dcqa-human";
    case Kind::kCustom: return "custom:" + custom_name_;
  }
  return "";
}

std::string FormatTimestamp(std::chrono::sys_seconds t) {
  std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<std::chrono::sys_seconds> ParseTimestamp(std::string_view text) {
  int y, mo, d, h, mi, s;
  char z = 0;
  std::string copy(text);
  if (std::sscanf(copy.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h,
                  &mi, &s, &z) != 7 ||
      z != 'Z' || copy.size() != 20) {
    return std::nullopt;
  }
  using namespace std::chrono;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                     day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

void Corpus::Reindex() {
  doc_index_.clear();
  edge_index_.clear();
  annotations_by_edge_.clear();
  for (size_t i = 0; i < documents.size(); ++i) doc_index_[documents[i].doc_id] = i;
  for (size_t i = 0; i < edges.size(); ++i) edge_index_[edges[i].edge_id] = i;
  for (size_t i = 0; i < annotations.size(); ++i) {
    annotations_by_edge_[annotations[i].edge_id].push_back(i);
  }
}

const Document* Corpus::FindDocument(std::string_view doc_id) const {
  auto it = doc_index_.find(std::string(doc_id));
  return it == doc_index_.end() ? nullptr : &documents[it->second];
}

const QudEdge* Corpus::FindEdge(std::string_view edge_id) const {
  auto it = edge_index_.find(std::string(edge_id));
  return it == edge_index_.end() ? nullptr : &edges[it->second];
}

const Document& Corpus::DocumentOf(const QudEdge& edge) const {
  const Document* doc = FindDocument(edge.doc_id);
  if (doc == nullptr) {
    throw Error(ErrorCode::kDanglingDocId,
                "edge " + edge.edge_id + " references unknown doc " + edge.doc_id);
  }
  return *doc;
}

std::vector<const AnnotationRecord*> Corpus::AnnotationsOf(
    std::string_view edge_id) const {
  std::vector<const AnnotationRecord*> out;
  auto it = annotations_by_edge_.find(std::string(edge_id));
  if (it == annotations_by_edge_.end()) return out;
  for (size_t i : it->second) out.push_back(&annotations[i]);
  return out;
}

std::map<std::string, int> Corpus::EdgeCountsBySystem() const {
  std::map<std::string, int> counts;
  for (const auto& e : edges) ++counts[e.system.ToString()];
  return counts;
}

int Corpus::machine_edge_count() const {
  return static_cast<int>(std::count_if(
      edges.begin(), edges.end(),
      [](const QudEdge& e) { return e.system.is_machine(); }));
}

namespace {

Document ParseDocument(const json& record, const Where& at) {
  Document doc;
  doc.doc_id = StringField(record, "doc_id", at);
  std::string tag = StringField(record, "split_tag", at);
  auto parsed_tag = ParseSplitTag(tag);
  if (!parsed_tag) Fail(ErrorCode::kSchemaViolation, at, "unknown split_tag \"" + tag + "\"");
  doc.split_tag = *parsed_tag;
  const json& sentences = Field(record, "sentences", at);
  if (!sentences.is_array()) Fail(ErrorCode::kSchemaViolation, at, "\"sentences\" must be an array");
  for (const json& s : sentences) {
    SentenceRecord rec;
    rec.index = IntField(s, "index", at);
    rec.text = StringField(s, "text", at);
    int expected = static_cast<int>(doc.sentences.size()) + 1;
    if (rec.index != expected) {
      Fail(ErrorCode::kSchemaViolation, at,
           "sentence indices must be contiguous from 1: expected " +
               std::to_string(expected) + ", got " + std::to_string(rec.index));
    }
    doc.sentences.push_back(std::move(rec));
  }
  if (doc.size() < 2) {
    Fail(ErrorCode::kSchemaViolation, at,
         "document " + doc.doc_id + " needs at least 2 sentences");
  }
  return doc;
}

QudEdge ParseEdge(const json& record, const Where& at) {
  QudEdge edge;
  edge.edge_id = StringField(record, "edge_id", at);
  edge.doc_id = StringField(record, "doc_id", at);
  edge.question = StringField(record, "question", at);
  edge.anchor_idx = IntField(record, "anchor_idx", at);
  edge.answer_idx = IntField(record, "answer_idx", at);
  std::string system = StringField(record, "system", at);
  auto parsed = System::Parse(system);
  if (!parsed) Fail(ErrorCode::kSchemaViolation, at, "unknown system \"" + system + "\"");
  edge.system = *parsed;
  return edge;
}

void CheckEdgeIndices(const QudEdge& edge, const Document& doc, const Where& at) {
  int n = doc.size();
  if (edge.anchor_idx < 1 || edge.anchor_idx > n) {
    Fail(ErrorCode::kIndexOutOfRange, at,
         "anchor_idx " + std::to_string(edge.anchor_idx) + " outside 1.." +
             std::to_string(n) + " of " + doc.doc_id);
  }
  if (edge.answer_idx < 2 || edge.answer_idx > n) {
    Fail(ErrorCode::kIndexOutOfRange, at,
         "answer_idx " + std::to_string(edge.answer_idx) + " outside 2.." +
             std::to_string(n) + " of " + doc.doc_id);
  }
}

CriteriaLabels ParseLabels(const json& record, const Where& at) {
  CriteriaLabels labels;
  for (Criterion c : kAllCriteria) {
    std::string key(CriterionName(c));
    std::string value = StringField(record, key.c_str(), at);
    if (!labels.Set(c, value)) {
      Fail(ErrorCode::kSchemaViolation, at,
           "invalid " + key + " label \"" + value + "\"");
    }
  }
  return labels;
}

AnnotationRecord ParseAnnotation(const json& record, const Where& at) {
  AnnotationRecord rec;
  rec.edge_id = StringField(record, "edge_id", at);
  rec.annotator_id = StringField(record, "annotator_id", at);
  rec.labels = ParseLabels(record, at);
  rec.comment = StringField(record, "comment", at, /*allow_empty=*/true);
  std::string ts = StringField(record, "timestamp", at);
  auto parsed_ts = ParseTimestamp(ts);
  if (!parsed_ts) Fail(ErrorCode::kSchemaViolation, at, "bad timestamp \"" + ts + "\"");
  rec.timestamp = *parsed_ts;
  return rec;
}

}  // namespace

ordered_json AnnotationToJson(const AnnotationRecord& a) {
  ordered_json rec;
  rec["edge_id"] = a.edge_id;
  rec["annotator_id"] = a.annotator_id;
  for (Criterion c : kAllCriteria) {
    rec[std::string(CriterionName(c))] = a.labels.Name(c);
  }
  rec["comment"] = a.comment;
  rec["timestamp"] = FormatTimestamp(a.timestamp);
  return rec;
}

AnnotationRecord AnnotationFromJson(const json& record) {
  return ParseAnnotation(record, Where{"annotation", 0});
}

Corpus LoadCorpus(const fs::path& dir) {
  Corpus corpus;
  const fs::path docs_path = dir / "documents.jsonl";
  const fs::path edges_path = dir / "edges.jsonl";
  const fs::path labels_path = dir / "labels.jsonl";
  const fs::path sim_path = dir / "similarity.jsonl";

  std::unordered_map<std::string, const Document*> docs;
  ForEachJsonLine(docs_path, [&](const json& record, int line) {
    Where at{docs_path, line};
    Document doc = ParseDocument(record, at);
    if (std::any_of(corpus.documents.begin(), corpus.documents.end(),
                    [&](const Document& d) { return d.doc_id == doc.doc_id; })) {
      Fail(ErrorCode::kSchemaViolation, at, "duplicate doc_id " + doc.doc_id);
    }
    corpus.documents.push_back(std::move(doc));
  });
  for (const auto& d : corpus.documents) docs[d.doc_id] = &d;

  std::unordered_map<std::string, const QudEdge*> edges;
  ForEachJsonLine(edges_path, [&](const json& record, int line) {
    Where at{edges_path, line};
    QudEdge edge = ParseEdge(record, at);
    auto doc = docs.find(edge.doc_id);
    if (doc == docs.end()) {
      Fail(ErrorCode::kDanglingDocId, at, "unknown doc_id " + edge.doc_id);
    }
    CheckEdgeIndices(edge, *doc->second, at);
    if (edges.count(edge.edge_id) != 0) {
      Fail(ErrorCode::kDuplicateEdgeId, at, "duplicate edge_id " + edge.edge_id);
    }
    corpus.edges.push_back(std::move(edge));
    edges[corpus.edges.back().edge_id] = nullptr;
  });
  for (const auto& e : corpus.edges) edges[e.edge_id] = &e;

  if (fs::exists(labels_path)) {
    std::set<std::pair<std::string, std::string>> seen;
    ForEachJsonLine(labels_path, [&](const json& record, int line) {
      Where at{labels_path, line};
      AnnotationRecord rec = ParseAnnotation(record, at);
      auto edge = edges.find(rec.edge_id);
      if (edge == edges.end()) {
        Fail(ErrorCode::kSchemaViolation, at, "label for unknown edge_id " + rec.edge_id);
      }
      if (!seen.emplace(rec.edge_id, rec.annotator_id).second) {
        Fail(ErrorCode::kSchemaViolation, at,
             "duplicate (edge_id, annotator_id) " + rec.edge_id + "/" + rec.annotator_id);
      }
      bool well_formed = edge->second->well_formed();
      if (!well_formed) {
        rec.labels = CriteriaLabels::AllSkipped();
      } else if (auto problem = CheckSkipPropagation(rec.labels, true)) {
        Fail(ErrorCode::kInvariantViolation, at, *problem);
      }
      corpus.annotations.push_back(std::move(rec));
    });
  }

  if (fs::exists(sim_path)) {
    ForEachJsonLine(sim_path, [&](const json& record, int line) {
      Where at{sim_path, line};
      SimilarityRecord rec;
      rec.edge_id = StringField(record, "edge_id", at);
      rec.reference_question = StringField(record, "reference_question", at);
      rec.annotator_id = StringField(record, "annotator_id", at);
      const json& score = Field(record, "score", at);
      if (!score.is_number()) Fail(ErrorCode::kSchemaViolation, at, "\"score\" must be a number");
      rec.score = score.get<double>();
      if (rec.score < 1.0 || rec.score > 5.0) {
        Fail(ErrorCode::kSchemaViolation, at, "similarity score outside [1,5]");
      }
      if (edges.count(rec.edge_id) == 0) {
        Fail(ErrorCode::kSchemaViolation, at, "similarity for unknown edge_id " + rec.edge_id);
      }
      corpus.similarities.push_back(std::move(rec));
    });
  }

  corpus.Reindex();
  return corpus;
}

ordered_json EdgeToJson(const QudEdge& e) {
  ordered_json rec;
  rec["edge_id"] = e.edge_id;
  rec["doc_id"] = e.doc_id;
  rec["question"] = e.question;
  rec["anchor_idx"] = e.anchor_idx;
  rec["answer_idx"] = e.answer_idx;
  rec["system"] = e.system.ToString();
  return rec;
}

void WriteCorpus(const Corpus& corpus, const fs::path& dir) {
  fs::create_directories(dir);
  std::string docs;
  for (const auto& d : corpus.documents) {
    ordered_json rec;
    rec["doc_id"] = d.doc_id;
    ordered_json sentences = ordered_json::array();
    for (const auto& s : d.sentences) {
      ordered_json sr;
      sr["index"] = s.index;
      sr["text"] = s.text;
      sentences.push_back(std::move(sr));
    }
    rec["sentences"] = std::move(sentences);
    rec["split_tag"] = SplitTagName(d.split_tag);
    docs += DumpJsonLine(rec);
  }
  WriteFileAtomic(dir / "documents.jsonl", docs);

  std::string edges;
  for (const auto& e : corpus.edges) edges += DumpJsonLine(EdgeToJson(e));
  WriteFileAtomic(dir / "edges.jsonl", edges);

  std::string labels;
  for (const auto& a : corpus.annotations) labels += DumpJsonLine(AnnotationToJson(a));
  WriteFileAtomic(dir / "labels.jsonl", labels);

  std::string sims;
  for (const auto& s : corpus.similarities) {
    ordered_json rec;
    rec["edge_id"] = s.edge_id;
    rec["reference_question"] = s.reference_question;
    rec["annotator_id"] = s.annotator_id;
    rec["score"] = s.score;
    sims += DumpJsonLine(rec);
  }
  WriteFileAtomic(dir / "similarity.jsonl", sims);
}

std::vector<std::string> ContextOf(const Document& document, int k) {
  if (k < 1 || k > document.size()) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "context index " + std::to_string(k) + " outside 1.." +
                    std::to_string(document.size()));
  }
  std::vector<std::string> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) out.push_back(document.sentences[i].text);
  return out;
}

std::pair<Corpus, Corpus> SplitValidation(const Corpus& corpus,
                                          std::span<const std::string> article_ids) {
  std::unordered_set<std::string> wanted(article_ids.begin(), article_ids.end());
  for (const auto& id : wanted) {
    if (corpus.FindDocument(id) == nullptr) {
      throw Error(ErrorCode::kUnknownArticleId, "unknown article id " + id);
    }
  }
  Corpus validation, test;
  std::unordered_set<std::string> validation_edges;
  for (const auto& d : corpus.documents) {
    (wanted.count(d.doc_id) ? validation : test).documents.push_back(d);
  }
  for (const auto& e : corpus.edges) {
    if (wanted.count(e.doc_id)) {
      validation.edges.push_back(e);
      validation_edges.insert(e.edge_id);
    } else {
      test.edges.push_back(e);
    }
  }
  for (const auto& a : corpus.annotations) {
    (validation_edges.count(a.edge_id) ? validation : test).annotations.push_back(a);
  }
  for (const auto& s : corpus.similarities) {
    (validation_edges.count(s.edge_id) ? validation : test).similarities.push_back(s);
  }
  validation.Reindex();
  test.Reindex();
  return {std::move(validation), std::move(test)};
}

std::vector<std::string> HeldOutArticleIds(const Corpus& corpus) {
  std::vector<std::string> ids;
  for (const auto& d : corpus.documents) {
    if (d.split_tag == SplitTag::kTrainHeldOut) ids.push_back(d.doc_id);
  }
  return ids;
}

namespace {

// Majority label name for one criterion; ties resolved by annotator order.
std::string_view MajorityName(const std::vector<const AnnotationRecord*>& recs,
                              Criterion c) {
  std::map<std::string_view, int> votes;
  for (const auto* r : recs) ++votes[r->labels.Name(c)];
  int best = 0;
  for (const auto& [name, n] : votes) best = std::max(best, n);
  for (const auto* r : recs) {  // recs are sorted by annotator_id
    if (votes[r->labels.Name(c)] == best) return r->labels.Name(c);
  }
  return kSkippedName;
}

}  // namespace

std::map<std::string, CriteriaLabels> GoldLabels(const Corpus& corpus) {
  std::map<std::string, std::vector<const AnnotationRecord*>> by_edge;
  for (const auto& a : corpus.annotations) by_edge[a.edge_id].push_back(&a);
  std::map<std::string, CriteriaLabels> gold;
  for (auto& [edge_id, recs] : by_edge) {
    auto adjudicated = std::find_if(recs.begin(), recs.end(), [](const auto* r) {
      return r->annotator_id == "adjudicated" || r->annotator_id == "gold";
    });
    if (adjudicated != recs.end()) {
      gold[edge_id] = (*adjudicated)->labels;
      continue;
    }
    if (recs.size() == 1) {
      gold[edge_id] = recs.front()->labels;
      continue;
    }
    std::sort(recs.begin(), recs.end(), [](const auto* a, const auto* b) {
      return a->annotator_id < b->annotator_id;
    });
    CriteriaLabels labels;
    labels.Set(Criterion::kLang, MajorityName(recs, Criterion::kLang));
    if (labels.lang == LangLabel::kPass) {
      std::vector<const AnnotationRecord*> passed;
      for (const auto* r : recs) {
        if (r->labels.lang == LangLabel::kPass) passed.push_back(r);
      }
      for (Criterion c : kMetricCriteria) labels.Set(c, MajorityName(passed, c));
    }
    gold[edge_id] = labels;
  }
  return gold;
}

std::map<std::string, std::string> ReferenceQuestions(const Corpus& corpus) {
  std::map<std::pair<std::string, int>, std::string> human;
  for (const auto& e : corpus.edges) {
    if (e.system.is_machine()) continue;
    human.emplace(std::pair{e.doc_id, e.answer_idx}, e.question);
  }
  std::map<std::string, std::string> from_similarity;
  for (const auto& s : corpus.similarities) {
    from_similarity.emplace(s.edge_id, s.reference_question);
  }
  std::map<std::string, std::string> refs;
  for (const auto& e : corpus.edges) {
    if (!e.system.is_machine()) continue;
    if (auto it = human.find({e.doc_id, e.answer_idx}); it != human.end()) {
      refs[e.edge_id] = it->second;
    } else if (auto jt = from_similarity.find(e.edge_id); jt != from_similarity.end()) {
      refs[e.edge_id] = jt->second;
    }
  }
  return refs;
}

}  // namespace qudeval::corpus
