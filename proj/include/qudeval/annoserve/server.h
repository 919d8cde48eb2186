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


// Annotation HTTP service.
//
//   GET  /api/tasks/next?annotator=ID   next unfinished task, 204 when done
//   POST /api/annotations               store one label set
//   GET  /api/progress?annotator=ID     counters, per-task flags, survey code
//   GET  /api/export                    labels.jsonl of the current store
//   GET  /api/agreement                 agreement over multiply-labeled edges
//
// Everything else is served from the static directory when one is set.

#ifndef QUDEVAL_ANNOSERVE_SERVER_H_
#define QUDEVAL_ANNOSERVE_SERVER_H_

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qudeval/annoserve/store.h"
#include "qudeval/corpus/corpus.h"

namespace httplib {
class Server;
}

namespace qudeval::annoserve {

// Static annotator -> ordered edge queue.
struct Assignments {
  std::map<std::string, std::vector<std::string>> queues;

  // {"annotator": ["edge_id", ...], ...}
  static Assignments Load(const std::filesystem::path& path);
  // Throws SchemaViolation when a queue names an unknown edge or repeats one.
  void Validate(const corpus::Corpus& corpus) const;
};

// "QUD-" followed by the first 8 hex digits of SHA-256 over the annotator id
// and its queue.
std::string SurveyCode(const std::string& annotator, const std::vector<std::string>& queue);

// Sentence roles: prior-context for S_1..S_k (S_k also anchor), answer for
// S_a, post-context for everything else.
nlohmann::ordered_json TaskView(const corpus::Document& doc, const corpus::QudEdge& edge);

struct ServerConfig {
  std::filesystem::path store_dir;
  std::optional<std::filesystem::path> static_dir;
  std::string cors_origin = "*";
  int compact_every = 1000;
  // Timestamp source for stored records.
  std::function<std::chrono::sys_seconds()> clock;
};

class AnnoServer {
 public:
  AnnoServer(corpus::Corpus corpus, Assignments assignments, ServerConfig config);
  ~AnnoServer();

  AnnoServer(const AnnoServer&) = delete;
  AnnoServer& operator=(const AnnoServer&) = delete;

  // Binds without serving; returns the port (an ephemeral one for port 0).
  int Bind(const std::string& host, int port);
  // Serves until Stop(). Call after Bind.
  void Serve();
  void Stop();
  void WaitUntilReady() const;

  AnnotationStore& store() { return *store_; }

 private:
  void Routes();

  corpus::Corpus corpus_;
  Assignments assignments_;
  ServerConfig config_;
  std::unique_ptr<AnnotationStore> store_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace qudeval::annoserve

#endif  // QUDEVAL_ANNOSERVE_SERVER_H_
