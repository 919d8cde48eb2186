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


// Adapter from the flat release layout to the canonical corpus.
//
// A release directory holds, each as a JSON array (.json) or JSON lines
// (.jsonl):
//   articles   {"article_id", "sentences": [text, ...], "split"?}
//   quds       {"article_id", "system", "question", "anchor_id", "answer_id",
//               "question_id"?, "annotator"?, "lang"?, "comp"?, "givn"?,
//               "relv"?, "comment"?, "timestamp"?}
//   similarity {"question_id", "reference_question", "annotator", "score"}  (optional)
// Records of `quds` sharing a question (same question_id, or same article,
// system, question and indices) collapse into one edge with one annotation
// per annotator. Every unrecognized value is an error naming file and record.

#ifndef QUDEVAL_CORPUS_INGEST_H_
#define QUDEVAL_CORPUS_INGEST_H_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "qudeval/corpus/corpus.h"

namespace qudeval::corpus {

struct IngestOptions {
  int index_base = 1;                     // numbering of anchor_id/answer_id
  std::string default_annotator = "gold";  // for label records without "annotator"
};

// Maps a release system name ("ko", "Ko et al.", "gpt-4", "dcqa", ...) to a
// System. Unknown names yield nullopt.
std::optional<System> ParseReleaseSystem(std::string_view name);

// Maps a release label value to the canonical name for `c`: canonical names,
// common spellings ("yes", "directly answered", "answer leakage", ...),
// 1-based option numbers, and ""/"skip" for skipped. nullopt if unknown.
std::optional<std::string> ParseReleaseLabel(Criterion c, const nlohmann::json& value);

// Reads a release directory. The result satisfies every invariant checked by
// LoadCorpus; labels of ill-formed edges are forced to skipped.
Corpus IngestRelease(const std::filesystem::path& dir, const IngestOptions& options = {});

}  // namespace qudeval::corpus

#endif  // QUDEVAL_CORPUS_INGEST_H_
