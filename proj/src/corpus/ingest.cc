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


#include "qudeval/corpus/ingest.h"

#include <cctype>
#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "qudeval/common/error.h"
#include "qudeval/common/files.h"

namespace qudeval::corpus {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct At {
  std::string file;
  int record = 0;
};

[[noreturn]] void Fail(const At& at, const std::string& message,
                       ErrorCode code = ErrorCode::kSchemaViolation) {
  throw Error(code, at.file + ": record " + std::to_string(at.record) + ": " + message);
}

// Lowercase, with every run of non-alphanumerics collapsed to one '_'.
std::string Normalize(std::string_view text) {
  std::string out;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      out += static_cast<char>(std::tolower(c));
    } else if (!out.empty() && out.back() != '_') {
      out += '_';
    }
  }
  if (!out.empty() && out.back() == '_') out.pop_back();
  return out;
}

std::string Squash(std::string_view text) {
  std::string out;
  for (char c : Normalize(text)) {
    if (c != '_') out += c;
  }
  return out;
}

// Finds `<stem>.jsonl` or `<stem>.json` in `dir`.
std::optional<fs::path> FindFile(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".jsonl", ".json"}) {
    fs::path p = dir / (stem + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

void ForEachRecord(const fs::path& path, const std::function<void(const json&, const At&)>& fn) {
  At at{path.filename().string(), 0};
  if (path.extension() == ".jsonl") {
    ForEachJsonLine(path, [&](const json& record, int line) {
      at.record = line;
      fn(record, at);
    });
    return;
  }
  json all;
  try {
    all = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, at.file + ": " + e.what());
  }
  if (!all.is_array()) Fail(at, "expected a JSON array of records");
  for (const auto& record : all) {
    ++at.record;
    fn(record, at);
  }
}

const json& Required(const json& record, const char* key, const At& at) {
  if (!record.is_object()) Fail(at, "not an object");
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) Fail(at, std::string("missing field \"") + key + "\"");
  return *it;
}

const json* Optional(const json& record, const char* key) {
  auto it = record.find(key);
  return it == record.end() || it->is_null() ? nullptr : &*it;
}

// Ids may be strings or integers.
std::string IdField(const json& record, const char* key, const At& at) {
  const json& v = Required(record, key, at);
  if (v.is_string() && !v.get<std::string>().empty()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  Fail(at, std::string("\"") + key + "\" must be a non-empty string or an integer");
}

std::string TextField(const json& record, const char* key, const At& at) {
  const json& v = Required(record, key, at);
  if (!v.is_string()) Fail(at, std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

int IndexField(const json& record, const char* key, const At& at, int base) {
  const json& v = Required(record, key, at);
  long long n = 0;
  if (v.is_number_integer()) {
    n = v.get<long long>();
  } else if (v.is_string()) {
    try {
      size_t used = 0;
      n = std::stoll(v.get<std::string>(), &used);
      if (used != v.get<std::string>().size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      Fail(at, std::string("\"") + key + "\" is not an integer");
    }
  } else {
    Fail(at, std::string("\"") + key + "\" is not an integer");
  }
  return static_cast<int>(n - base + 1);
}

const std::map<std::string, std::string>& Aliases(Criterion c) {
  static const std::map<std::string, std::string> lang = {
      {"pass", "pass"}, {"yes", "pass"}, {"y", "pass"},  {"true", "pass"},
      {"fail", "fail"}, {"no", "fail"},  {"n", "fail"},  {"false", "fail"}};
  static const std::map<std::string, std::string> comp = {
      {"direct", "direct"},
      {"directly_answered", "direct"},
      {"answered", "direct"},
      {"yes", "direct"},
      {"unfocused", "unfocused"},
      {"not_focused", "unfocused"},
      {"partially_answered", "unfocused"},
      {"answered_but_unfocused", "unfocused"},
      {"not_answered", "not_answered"},
      {"unanswered", "not_answered"},
      {"no", "not_answered"}};
  static const std::map<std::string, std::string> givn = {
      {"no_new", "no_new"},
      {"no_new_concepts", "no_new"},
      {"none", "no_new"},
      {"answer_leak", "answer_leak"},
      {"answer_leakage", "answer_leak"},
      {"leak", "answer_leak"},
      {"hallucination", "hallucination"},
      {"hallucinated", "hallucination"}};
  static const std::map<std::string, std::string> relv = {
      {"fully", "fully"},
      {"fully_grounded", "fully"},
      {"partially", "partially"},
      {"partially_grounded", "partially"},
      {"not_grounded", "not_grounded"},
      {"ungrounded", "not_grounded"},
      {"none", "not_grounded"}};
  switch (c) {
    case Criterion::kLang: return lang;
    case Criterion::kComp: return comp;
    case Criterion::kGivn: return givn;
    case Criterion::kRelv: return relv;
  }
  return lang;
}

std::optional<std::string> ByOption(Criterion c, long long n) {
  auto labels = CriterionLabels(c);
  if (n < 1 || n > static_cast<long long>(labels.size())) return std::nullopt;
  return std::string(labels[n - 1]);
}

}  // namespace

std::optional<System> ParseReleaseSystem(std::string_view name) {
  if (auto s = System::Parse(name)) return s;
  std::string key = Squash(name);
  static const std::map<std::string, System::Kind> kAliases = {
      {"ko", System::Kind::kKoEtAl},         {"koetal", System::Kind::kKoEtAl},
      {"longformer", System::Kind::kKoEtAl}, {"chatgpt", System::Kind::kChatGpt},
      {"gpt35", System::Kind::kChatGpt},     {"gpt35turbo", System::Kind::kChatGpt},
      {"alpaca", System::Kind::kAlpaca},     {"gpt4", System::Kind::kGpt4},
      {"dcqa", System::Kind::kDcqaHuman},    {"dcqahuman", System::Kind::kDcqaHuman},
      {"human", System::Kind::kDcqaHuman}};
  auto it = kAliases.find(key);
  if (it == kAliases.end()) return std::nullopt;
  return System(it->second);
}

std::optional<std::string> ParseReleaseLabel(Criterion c, const json& value) {
  if (value.is_null()) return std::string(kSkippedName);
  if (value.is_number_integer()) return ByOption(c, value.get<long long>());
  if (!value.is_string()) return std::nullopt;
  std::string key = Normalize(value.get<std::string>());
  if (key.empty() || key == "skip" || key == "skipped" || key == "n_a" || key == "na") {
    return std::string(kSkippedName);
  }
  if (std::all_of(key.begin(), key.end(), [](char ch) { return std::isdigit(ch); })) {
    return key.size() > 2 ? std::nullopt : ByOption(c, std::stoll(key));
  }
  const auto& aliases = Aliases(c);
  auto it = aliases.find(key);
  if (it == aliases.end()) return std::nullopt;
  return it->second;
}

Corpus IngestRelease(const fs::path& dir, const IngestOptions& options) {
  auto articles = FindFile(dir, "articles");
  auto quds = FindFile(dir, "quds");
  if (!articles || !quds) {
    throw Error(ErrorCode::kIo, dir.string() + ": release needs articles.json[l] and quds.json[l]");
  }
  Corpus corpus;
  std::map<std::string, int> sentence_counts;
  ForEachRecord(*articles, [&](const json& record, const At& at) {
    std::vector<std::string> sentences;
    const json& list = Required(record, "sentences", at);
    if (!list.is_array() || list.empty()) Fail(at, "\"sentences\" must be a non-empty array");
    for (const auto& s : list) {
      if (!s.is_string()) Fail(at, "sentences must be strings");
      sentences.push_back(s.get<std::string>());
    }
    SplitTag tag = SplitTag::kUnassigned;
    if (const json* split = Optional(record, "split")) {
      std::string name = split->is_string() ? Normalize(split->get<std::string>()) : "";
      std::replace(name.begin(), name.end(), '_', '-');
      auto parsed = ParseSplitTag(name == "held-out" ? "train-held-out" : name);
      if (!parsed) Fail(at, "unknown split " + split->dump());
      tag = *parsed;
    }
    std::string id = IdField(record, "article_id", at);
    if (!sentence_counts.emplace(id, static_cast<int>(sentences.size())).second) {
      Fail(at, "article " + id + " appears twice");
    }
    corpus.documents.push_back(MakeDocument(id, sentences, tag));
  });

  using EdgeKey = std::tuple<std::string, std::string, std::string, int, int>;
  std::map<EdgeKey, std::string> by_content;
  std::map<std::string, size_t> by_id;
  std::map<std::string, int> serial;
  std::set<std::pair<std::string, std::string>> labeled;
  ForEachRecord(*quds, [&](const json& record, const At& at) {
    QudEdge e;
    e.doc_id = IdField(record, "article_id", at);
    std::string system_name = TextField(record, "system", at);
    auto system = ParseReleaseSystem(system_name);
    if (!system) Fail(at, "unknown system \"" + system_name + "\"");
    e.system = *system;
    e.question = TextField(record, "question", at);
    e.anchor_idx = IndexField(record, "anchor_id", at, options.index_base);
    e.answer_idx = IndexField(record, "answer_id", at, options.index_base);
    auto doc = sentence_counts.find(e.doc_id);
    if (doc == sentence_counts.end()) {
      Fail(at, "unknown article " + e.doc_id, ErrorCode::kUnknownArticleId);
    }
    for (int idx : {e.anchor_idx, e.answer_idx}) {
      if (idx < 1 || idx > doc->second) {
        Fail(at, "sentence index out of range for article " + e.doc_id,
             ErrorCode::kIndexOutOfRange);
      }
    }
    EdgeKey key{e.doc_id, e.system.ToString(), e.question, e.anchor_idx, e.answer_idx};

    if (Optional(record, "question_id")) {
      e.edge_id = IdField(record, "question_id", at);
    } else if (auto it = by_content.find(key); it != by_content.end()) {
      e.edge_id = it->second;
    } else {
      std::string stem = e.system.ToString() + ":" + e.doc_id + ":" + std::to_string(e.answer_idx);
      e.edge_id = stem + ":" + std::to_string(++serial[stem]);
    }
    if (auto it = by_id.find(e.edge_id); it != by_id.end()) {
      const QudEdge& seen = corpus.edges[it->second];
      if (EdgeKey{seen.doc_id, seen.system.ToString(), seen.question, seen.anchor_idx,
                  seen.answer_idx} != key) {
        Fail(at, "question_id " + e.edge_id + " reused for a different question",
             ErrorCode::kDuplicateEdgeId);
      }
    } else {
      by_id[e.edge_id] = corpus.edges.size();
      by_content.emplace(key, e.edge_id);
      corpus.edges.push_back(e);
    }

    bool has_labels = false;
    for (Criterion c : kAllCriteria) {
      has_labels |= Optional(record, CriterionName(c).data()) != nullptr;
    }
    if (!has_labels) return;
    AnnotationRecord a;
    a.edge_id = e.edge_id;
    a.annotator_id = Optional(record, "annotator") ? IdField(record, "annotator", at)
                                                   : options.default_annotator;
    if (!labeled.emplace(a.edge_id, a.annotator_id).second) {
      Fail(at, "second label record by " + a.annotator_id + " for " + a.edge_id);
    }
    for (Criterion c : kAllCriteria) {
      const json* v = Optional(record, CriterionName(c).data());
      auto name = ParseReleaseLabel(c, v ? *v : json());
      if (!name) Fail(at, "unknown " + std::string(CriterionName(c)) + " label " + v->dump());
      a.labels.Set(c, *name);
    }
    if (!e.well_formed()) a.labels = CriteriaLabels::AllSkipped();
    if (auto why = CheckSkipPropagation(a.labels, e.well_formed())) {
      Fail(at, *why, ErrorCode::kInvariantViolation);
    }
    if (const json* comment = Optional(record, "comment")) {
      if (!comment->is_string()) Fail(at, "\"comment\" must be a string");
      a.comment = comment->get<std::string>();
    }
    if (const json* ts = Optional(record, "timestamp")) {
      if (ts->is_number_integer()) {
        a.timestamp = std::chrono::sys_seconds{std::chrono::seconds{ts->get<long long>()}};
      } else if (auto parsed = ts->is_string() ? ParseTimestamp(ts->get<std::string>())
                                               : std::nullopt) {
        a.timestamp = *parsed;
      } else {
        Fail(at, "bad timestamp " + ts->dump());
      }
    }
    corpus.annotations.push_back(std::move(a));
  });

  if (auto similarity = FindFile(dir, "similarity")) {
    ForEachRecord(*similarity, [&](const json& record, const At& at) {
      SimilarityRecord s;
      s.edge_id = IdField(record, "question_id", at);
      if (!by_id.count(s.edge_id)) Fail(at, "unknown question_id " + s.edge_id);
      s.reference_question = TextField(record, "reference_question", at);
      s.annotator_id = IdField(record, "annotator", at);
      const json& score = Required(record, "score", at);
      if (!score.is_number()) Fail(at, "\"score\" must be a number");
      s.score = score.get<double>();
      corpus.similarities.push_back(std::move(s));
    });
  }
  corpus.Reindex();
  return corpus;
}

}  // namespace qudeval::corpus
