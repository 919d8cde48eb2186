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


#include "qudeval/annoserve/store.h"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <spdlog/spdlog.h>

#include "qudeval/common/error.h"
#include "qudeval/common/files.h"

namespace qudeval::annoserve {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr char kJournal[] = "journal.jsonl";
constexpr char kSnapshot[] = "snapshot.jsonl";
constexpr char kAudit[] = "audit.jsonl";

[[noreturn]] void IoFail(const std::string& what, const fs::path& path) {
  throw Error(ErrorCode::kIo, what + " " + path.string() + ": " + std::strerror(errno));
}

void WriteAll(int fd, std::string_view data, const fs::path& path) {
  while (!data.empty()) {
    ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      IoFail("write", path);
    }
    data.remove_prefix(static_cast<size_t>(n));
  }
}

void AppendDurably(const fs::path& path, std::string_view data) {
  int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) IoFail("open", path);
  WriteAll(fd, data, path);
  if (::fsync(fd) != 0) {
    ::close(fd);
    IoFail("fsync", path);
  }
  ::close(fd);
}

std::vector<json> ReadLines(const fs::path& path) {
  std::vector<json> out;
  if (!fs::exists(path)) return out;
  ForEachJsonLine(path, [&](const json& record, int) { out.push_back(record); });
  return out;
}

StoredAnnotation ParseStored(const json& entry) {
  return {corpus::AnnotationFromJson(entry.at("record")), entry.at("revision").get<int64_t>()};
}

}  // namespace

std::string StoreSnapshot::Export() const {
  std::string out;
  for (const auto& [key, stored] : records) {
    out += DumpJsonLine(corpus::AnnotationToJson(stored.record));
  }
  return out;
}

std::vector<AnnotationRecord> StoreSnapshot::Annotations() const {
  std::vector<AnnotationRecord> out;
  for (const auto& [key, stored] : records) out.push_back(stored.record);
  return out;
}

AnnotationStore::AnnotationStore(fs::path dir, int compact_every)
    : dir_(std::move(dir)), compact_every_(compact_every) {
  fs::create_directories(dir_);
  Replay();
  fs::path journal = dir_ / kJournal;
  journal_fd_ = ::open(journal.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (journal_fd_ < 0) IoFail("open", journal);
}

AnnotationStore::~AnnotationStore() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
}

void AnnotationStore::Replay() {
  auto state = std::make_shared<StoreSnapshot>();
  fs::path snapshot_path = dir_ / kSnapshot;
  auto snapshot_lines = ReadLines(snapshot_path);
  if (!snapshot_lines.empty()) {
    try {
      state->last_seq = snapshot_lines.front().at("last_seq").get<int64_t>();
      for (size_t i = 1; i < snapshot_lines.size(); ++i) {
        StoredAnnotation s = ParseStored(snapshot_lines[i]);
        state->records[{s.record.edge_id, s.record.annotator_id}] = std::move(s);
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation, snapshot_path.string() + ": " + e.what());
    }
  }

  fs::path journal = dir_ / kJournal;
  if (fs::exists(journal)) {
    std::string text = ReadFile(journal);
    size_t complete = text.rfind('\n');
    complete = complete == std::string::npos ? 0 : complete + 1;
    if (complete != text.size()) {
      spdlog::warn("dropping torn journal tail of {} bytes in {}", text.size() - complete,
                   journal.string());
      fs::resize_file(journal, complete);
      text.resize(complete);
    }
    size_t start = 0;
    int line_no = 0;
    while (start < text.size()) {
      size_t end = text.find('\n', start);
      std::string_view line(text.data() + start, end - start);
      start = end + 1;
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
      try {
        json entry = json::parse(line);
        int64_t seq = entry.at("seq").get<int64_t>();
        if (seq <= state->last_seq) continue;  // already folded into the snapshot
        StoredAnnotation s = ParseStored(entry);
        state->records[{s.record.edge_id, s.record.annotator_id}] = std::move(s);
        state->last_seq = seq;
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kSchemaViolation,
                    journal.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
  }
  std::atomic_store(&current_, std::shared_ptr<const StoreSnapshot>(std::move(state)));
}

std::shared_ptr<const StoreSnapshot> AnnotationStore::snapshot() const {
  return std::atomic_load(&current_);
}

void AnnotationStore::AppendJournal(const std::string& line) {
  fs::path journal = dir_ / kJournal;
  WriteAll(journal_fd_, line, journal);
  if (::fsync(journal_fd_) != 0) IoFail("fsync", journal);
}

PutResult AnnotationStore::Put(const AnnotationRecord& record, bool well_formed,
                               std::optional<int64_t> base_revision) {
  if (auto problem = corpus::CheckSkipPropagation(record.labels, well_formed)) {
    throw Error(ErrorCode::kInvariantViolation, *problem);
  }
  std::lock_guard lock(write_mu_);
  auto current = snapshot();
  auto key = std::pair{record.edge_id, record.annotator_id};
  PutResult result;
  int64_t previous = 0;
  if (auto it = current->records.find(key); it != current->records.end()) {
    previous = it->second.revision;
    result.replaced = it->second.record;
  }
  result.revision = previous + 1;
  result.conflict = base_revision.has_value() && *base_revision != previous;

  ordered_json entry;
  entry["seq"] = current->last_seq + 1;
  entry["revision"] = result.revision;
  entry["conflict"] = result.conflict;
  entry["record"] = corpus::AnnotationToJson(record);
  if (result.replaced) entry["replaced"] = corpus::AnnotationToJson(*result.replaced);
  AppendJournal(DumpJsonLine(entry));

  auto next = std::make_shared<StoreSnapshot>(*current);
  next->records[key] = {record, result.revision};
  next->last_seq = current->last_seq + 1;
  std::atomic_store(&current_, std::shared_ptr<const StoreSnapshot>(std::move(next)));

  if (++since_compaction_ >= compact_every_) CompactLocked();
  return result;
}

void AnnotationStore::Compact() {
  std::lock_guard lock(write_mu_);
  CompactLocked();
}

void AnnotationStore::CompactLocked() {
  since_compaction_ = 0;
  fs::path journal = dir_ / kJournal;
  std::string pending = ReadFile(journal);
  if (!pending.empty()) AppendDurably(dir_ / kAudit, pending);

  auto state = snapshot();
  ordered_json header;
  header["last_seq"] = state->last_seq;
  std::string text = DumpJsonLine(header);
  for (const auto& [key, stored] : state->records) {
    ordered_json line;
    line["revision"] = stored.revision;
    line["record"] = corpus::AnnotationToJson(stored.record);
    text += DumpJsonLine(line);
  }
  WriteFileAtomic(dir_ / kSnapshot, text);

  // A crash before this point leaves journal lines whose seq the snapshot
  // already covers; Replay skips them.
  if (::ftruncate(journal_fd_, 0) != 0) IoFail("truncate", journal);
  if (::fsync(journal_fd_) != 0) IoFail("fsync", journal);
}

std::vector<json> AnnotationStore::AuditTrail() const {
  std::lock_guard lock(write_mu_);
  auto out = ReadLines(dir_ / kAudit);
  for (auto& line : ReadLines(dir_ / kJournal)) out.push_back(std::move(line));
  return out;
}

}  // namespace qudeval::annoserve
