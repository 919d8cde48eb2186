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


#include "qudeval/annoserve/server.h"

#include <set>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "qudeval/assess/reports.h"
#include "qudeval/common/error.h"
#include "qudeval/common/files.h"
#include "qudeval/common/hash.h"

namespace qudeval::annoserve {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr char kJsonType[] = "application/json";

void Reply(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), kJsonType);
}

void Fail(httplib::Response& res, int status, const std::string& code,
          const std::string& message) {
  ordered_json body;
  body["error"] = code;
  body["message"] = message;
  Reply(res, status, body);
}

ordered_json Options() {
  ordered_json j;
  for (corpus::Criterion c : corpus::kAllCriteria) {
    auto names = corpus::CriterionLabels(c);
    j[std::string(corpus::CriterionName(c))] = std::vector<std::string>(names.begin(), names.end());
  }
  return j;
}

}  // namespace

Assignments Assignments::Load(const std::filesystem::path& path) {
  Assignments a;
  try {
    json j = json::parse(ReadFile(path));
    for (const auto& [annotator, edges] : j.items()) {
      a.queues[annotator] = edges.get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, path.string() + ": " + e.what());
  }
  return a;
}

void Assignments::Validate(const corpus::Corpus& corpus) const {
  for (const auto& [annotator, queue] : queues) {
    std::set<std::string> seen;
    for (const auto& edge_id : queue) {
      if (corpus.FindEdge(edge_id) == nullptr) {
        throw Error(ErrorCode::kSchemaViolation,
                    "assignment of " + annotator + " names unknown edge " + edge_id);
      }
      if (!seen.insert(edge_id).second) {
        throw Error(ErrorCode::kSchemaViolation,
                    "assignment of " + annotator + " repeats edge " + edge_id);
      }
    }
  }
}

std::string SurveyCode(const std::string& annotator, const std::vector<std::string>& queue) {
  Sha256Builder h;
  h.Update(annotator);
  for (const auto& edge_id : queue) {
    h.Update("\n");
    h.Update(edge_id);
  }
  return "QUD-" + h.FinishHex().substr(0, 8);
}

ordered_json TaskView(const corpus::Document& doc, const corpus::QudEdge& edge) {
  ordered_json j;
  j["edge_id"] = edge.edge_id;
  j["doc_id"] = edge.doc_id;
  j["question"] = edge.question;
  j["anchor_idx"] = edge.anchor_idx;
  j["answer_idx"] = edge.answer_idx;
  j["forced_skip"] = !edge.well_formed();
  j["sentences"] = ordered_json::array();
  for (const auto& s : doc.sentences) {
    std::vector<std::string> roles;
    if (s.index <= edge.anchor_idx) roles.push_back("prior-context");
    if (s.index == edge.anchor_idx) roles.push_back("anchor");
    if (s.index == edge.answer_idx) roles.push_back("answer");
    if (roles.empty()) roles.push_back("post-context");
    j["sentences"].push_back({{"index", s.index}, {"text", s.text}, {"roles", roles}});
  }
  j["options"] = Options();
  return j;
}

AnnoServer::AnnoServer(corpus::Corpus corpus, Assignments assignments, ServerConfig config)
    : corpus_(std::move(corpus)),
      assignments_(std::move(assignments)),
      config_(std::move(config)),
      http_(std::make_unique<httplib::Server>()) {
  corpus_.Reindex();
  assignments_.Validate(corpus_);
  if (!config_.clock) {
    config_.clock = [] {
      return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    };
  }
  store_ = std::make_unique<AnnotationStore>(config_.store_dir, config_.compact_every);
  Routes();
}

AnnoServer::~AnnoServer() { Stop(); }

int AnnoServer::Bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = http_->bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!http_->bind_to_port(host, port)) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void AnnoServer::Serve() { http_->listen_after_bind(); }

void AnnoServer::Stop() {
  if (http_) http_->stop();
}

void AnnoServer::WaitUntilReady() const { http_->wait_until_ready(); }

void AnnoServer::Routes() {
  http_->set_default_headers({{"Access-Control-Allow-Origin", config_.cors_origin},
                              {"Vary", "Origin"}});
  http_->Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
  });

  // Resolves ?annotator=ID; replies 400/404 and returns null on failure.
  auto queue_of = [this](const httplib::Request& req,
                         httplib::Response& res) -> const std::vector<std::string>* {
    if (!req.has_param("annotator")) {
      Fail(res, 400, "bad_request", "missing annotator parameter");
      return nullptr;
    }
    auto it = assignments_.queues.find(req.get_param_value("annotator"));
    if (it == assignments_.queues.end()) {
      Fail(res, 404, "unknown_annotator", "no assignment for " + req.get_param_value("annotator"));
      return nullptr;
    }
    return &it->second;
  };

  auto progress = [this](const std::string& annotator, const std::vector<std::string>& queue,
                         const StoreSnapshot& state) {
    ordered_json j;
    j["annotator"] = annotator;
    int completed = 0;
    j["tasks"] = ordered_json::array();
    for (size_t i = 0; i < queue.size(); ++i) {
      bool done = state.records.count({queue[i], annotator}) > 0;
      completed += done;
      j["tasks"].push_back({{"ordinal", i + 1}, {"edge_id", queue[i]}, {"completed", done}});
    }
    j["completed"] = completed;
    j["total"] = queue.size();
    if (completed == static_cast<int>(queue.size())) j["survey_code"] = SurveyCode(annotator, queue);
    return j;
  };

  http_->Get("/api/tasks/next", [this, queue_of, progress](const httplib::Request& req,
                                                           httplib::Response& res) {
    const auto* queue = queue_of(req, res);
    if (queue == nullptr) return;
    std::string annotator = req.get_param_value("annotator");
    auto state = store_->snapshot();
    for (size_t i = 0; i < queue->size(); ++i) {
      if (state->records.count({(*queue)[i], annotator})) continue;
      const corpus::QudEdge* edge = corpus_.FindEdge((*queue)[i]);
      ordered_json view = TaskView(corpus_.DocumentOf(*edge), *edge);
      view["ordinal"] = i + 1;
      ordered_json p = progress(annotator, *queue, *state);
      view["progress"] = {{"completed", p["completed"]}, {"total", p["total"]}};
      Reply(res, 200, view);
      return;
    }
    res.status = 204;
  });

  http_->Get("/api/progress", [queue_of, progress, this](const httplib::Request& req,
                                                         httplib::Response& res) {
    const auto* queue = queue_of(req, res);
    if (queue == nullptr) return;
    Reply(res, 200, progress(req.get_param_value("annotator"), *queue, *store_->snapshot()));
  });

  http_->Post("/api/annotations", [this, progress](const httplib::Request& req,
                                                   httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      Fail(res, 400, "bad_request", std::string("malformed JSON: ") + e.what());
      return;
    }
    corpus::AnnotationRecord record;
    std::optional<int64_t> base_revision;
    try {
      record.edge_id = body.at("edge_id").get<std::string>();
      record.annotator_id = body.at("annotator_id").get<std::string>();
      record.comment = body.value("comment", "");
      if (body.contains("base_revision")) base_revision = body["base_revision"].get<int64_t>();
      const json& labels = body.at("labels");
      for (corpus::Criterion c : corpus::kAllCriteria) {
        std::string name = labels.at(std::string(corpus::CriterionName(c))).get<std::string>();
        if (!record.labels.Set(c, name)) {
          Fail(res, 422, "invalid_label",
               "\"" + name + "\" is not a " + std::string(corpus::CriterionName(c)) + " label");
          return;
        }
      }
    } catch (const json::exception& e) {
      Fail(res, 400, "bad_request", e.what());
      return;
    }
    auto queue = assignments_.queues.find(record.annotator_id);
    if (queue == assignments_.queues.end()) {
      Fail(res, 404, "unknown_annotator", "no assignment for " + record.annotator_id);
      return;
    }
    const corpus::QudEdge* edge = corpus_.FindEdge(record.edge_id);
    if (edge == nullptr) {
      Fail(res, 404, "unknown_edge", "no edge " + record.edge_id);
      return;
    }
    if (std::find(queue->second.begin(), queue->second.end(), record.edge_id) ==
        queue->second.end()) {
      Fail(res, 422, "not_assigned", record.edge_id + " is not assigned to " + record.annotator_id);
      return;
    }
    record.timestamp = config_.clock();
    PutResult put;
    try {
      put = store_->Put(record, edge->well_formed(), base_revision);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvariantViolation) throw;
      Fail(res, 422, "invariant_violation", e.what());
      return;
    }
    ordered_json out;
    out["edge_id"] = record.edge_id;
    out["annotator_id"] = record.annotator_id;
    out["revision"] = put.revision;
    if (put.conflict) {
      out["status"] = "conflict";
      out["resolution"] = "last_writer_wins";
    } else {
      out["status"] = put.replaced ? "overwritten" : "created";
    }
    ordered_json p = progress(record.annotator_id, queue->second, *store_->snapshot());
    out["progress"] = {{"completed", p["completed"]}, {"total", p["total"]}};
    if (p.contains("survey_code")) out["survey_code"] = p["survey_code"];
    Reply(res, put.conflict ? 409 : 201, out);
  });

  http_->Get("/api/export", [this](const httplib::Request&, httplib::Response& res) {
    res.status = 200;
    res.set_content(store_->snapshot()->Export(), "application/x-ndjson");
  });

  http_->Get("/api/agreement", [this](const httplib::Request&, httplib::Response& res) {
    corpus::Corpus labeled;
    labeled.annotations = store_->snapshot()->Annotations();
    try {
      Reply(res, 200, assess::AgreementToJson(assess::BuildAgreementReport(labeled)));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInsufficientAnnotators) throw;
      ordered_json out;
      out["kind"] = "agreement";
      out["status"] = "insufficient_annotators";
      out["message"] = e.what();
      Reply(res, 200, out);
    }
  });

  http_->set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                  std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    spdlog::error("request failed: {}", message);
    Fail(res, 500, "internal", message);
  });

  if (config_.static_dir) {
    if (!http_->set_mount_point("/", config_.static_dir->string())) {
      throw Error(ErrorCode::kIo, "static directory " + config_.static_dir->string() +
                                      " does not exist");
    }
  } else {
    http_->Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("annoserve: no static directory configured; API under /api/\n",
                      "text/plain");
    });
  }
}

}  // namespace qudeval::annoserve
