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


// Durable annotation store: an append-only JSON-lines journal replayed over
// the last compacted snapshot.
//
// Layout of the store directory:
//   journal.jsonl   {"seq","revision","conflict","record":{labels.jsonl line}}
//   snapshot.jsonl  first line {"last_seq"}, then {"revision","record"} lines
//   audit.jsonl     journal lines moved out by compaction, in order
//
// Every accepted write stays in journal.jsonl or audit.jsonl, so the full
// history survives compaction.

#ifndef QUDEVAL_ANNOSERVE_STORE_H_
#define QUDEVAL_ANNOSERVE_STORE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qudeval/corpus/corpus.h"

namespace qudeval::annoserve {

using corpus::AnnotationRecord;

struct StoredAnnotation {
  AnnotationRecord record;
  int64_t revision = 0;  // 1 for the first write of (edge, annotator)
};

// Immutable view of the store; replaced wholesale after every write.
struct StoreSnapshot {
  std::map<std::pair<std::string, std::string>, StoredAnnotation> records;
  int64_t last_seq = 0;

  // labels.jsonl lines ordered by (edge_id, annotator_id).
  std::string Export() const;
  std::vector<AnnotationRecord> Annotations() const;
};

struct PutResult {
  int64_t revision = 0;
  // The caller's base revision was stale: the write still wins and the
  // overwritten record is kept in the audit trail.
  bool conflict = false;
  std::optional<AnnotationRecord> replaced;
};

class AnnotationStore {
 public:
  // Creates the directory when missing and replays snapshot and journal.
  // A torn final journal line (no trailing newline) is dropped.
  explicit AnnotationStore(std::filesystem::path dir, int compact_every = 1000);
  ~AnnotationStore();

  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  // Appends and fsyncs before returning. Throws InvariantViolation when the
  // labels break skip propagation for an edge of the given well-formedness.
  // `base_revision` is the revision the writer last saw (0 for none).
  PutResult Put(const AnnotationRecord& record, bool well_formed,
                std::optional<int64_t> base_revision = std::nullopt);

  std::shared_ptr<const StoreSnapshot> snapshot() const;

  // Folds the journal into snapshot.jsonl and moves its lines to audit.jsonl.
  void Compact();

  // audit.jsonl followed by journal.jsonl, oldest first.
  std::vector<nlohmann::json> AuditTrail() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  void Replay();
  void AppendJournal(const std::string& line);
  void CompactLocked();

  std::filesystem::path dir_;
  int compact_every_;
  int since_compaction_ = 0;
  int journal_fd_ = -1;
  mutable std::mutex write_mu_;  // serializes writers
  std::shared_ptr<const StoreSnapshot> current_;
};

}  // namespace qudeval::annoserve

#endif  // QUDEVAL_ANNOSERVE_STORE_H_
