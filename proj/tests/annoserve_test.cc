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


#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "httplib.h"
#include "qudeval/annoserve/server.h"
#include "qudeval/annoserve/store.h"
#include "qudeval/assess/reports.h"
#include "qudeval/common/error.h"
#include "qudeval/common/files.h"

namespace qudeval::annoserve {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using corpus::AnnotationRecord;
using corpus::Criterion;

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("qudeval_annoserve_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

AnnotationRecord Record(const std::string& edge, const std::string& annotator,
                        const std::string& labels, const std::string& comment = "") {
  AnnotationRecord r;
  r.edge_id = edge;
  r.annotator_id = annotator;
  r.comment = comment;
  r.timestamp = std::chrono::sys_seconds{std::chrono::seconds{1700000000}};
  std::istringstream in(labels);
  for (Criterion c : corpus::kAllCriteria) {
    std::string name;
    in >> name;
    EXPECT_TRUE(r.labels.Set(c, name == "-" ? "skipped" : name));
  }
  return r;
}

// ------------------------------------------------------------------ store

TEST(StoreTest, PutRevisionsAndReplay) {
  TempDir dir;
  {
    AnnotationStore store(dir.path());
    auto first = store.Put(Record("e1", "ann", "pass direct no_new fully"), true);
    EXPECT_EQ(first.revision, 1);
    EXPECT_FALSE(first.conflict);
    auto second = store.Put(Record("e1", "ann", "pass unfocused no_new fully"), true);
    EXPECT_EQ(second.revision, 2);
    ASSERT_TRUE(second.replaced.has_value());
    EXPECT_EQ(second.replaced->labels.comp, corpus::CompLabel::kDirect);
    store.Put(Record("e2", "ann", "fail - - -"), true);
  }
  AnnotationStore reopened(dir.path());
  auto snap = reopened.snapshot();
  ASSERT_EQ(snap->records.size(), 2u);
  EXPECT_EQ(snap->records.at({"e1", "ann"}).revision, 2);
  EXPECT_EQ(snap->records.at({"e1", "ann"}).record.labels.comp, corpus::CompLabel::kUnfocused);
  EXPECT_EQ(snap->last_seq, 3);
  EXPECT_EQ(reopened.AuditTrail().size(), 3u);
}

TEST(StoreTest, SkipPropagationIsEnforced) {
  TempDir dir;
  AnnotationStore store(dir.path());
  auto code = [&](const AnnotationRecord& r, bool well_formed) {
    try {
      store.Put(r, well_formed);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code(Record("e", "a", "fail direct - -"), true), ErrorCode::kInvariantViolation);
  EXPECT_EQ(code(Record("e", "a", "pass direct no_new fully"), false),
            ErrorCode::kInvariantViolation);
  EXPECT_TRUE(store.snapshot()->records.empty());
  EXPECT_NO_THROW(store.Put(Record("e", "a", "- - - -"), false));
}

TEST(StoreTest, StaleBaseRevisionIsAConflictThatStillWins) {
  TempDir dir;
  AnnotationStore store(dir.path());
  store.Put(Record("e", "a", "pass direct no_new fully"), true, 0);
  auto stale = store.Put(Record("e", "a", "pass unfocused no_new fully"), true, 0);
  EXPECT_TRUE(stale.conflict);
  EXPECT_EQ(stale.revision, 2);
  EXPECT_EQ(store.snapshot()->records.at({"e", "a"}).record.labels.comp,
            corpus::CompLabel::kUnfocused);
  auto fresh = store.Put(Record("e", "a", "pass direct no_new fully"), true, 2);
  EXPECT_FALSE(fresh.conflict);
  auto audit = store.AuditTrail();
  ASSERT_EQ(audit.size(), 3u);
  EXPECT_TRUE(audit[1]["conflict"].get<bool>());
  EXPECT_EQ(audit[1]["replaced"]["comp"], "direct");
}

TEST(StoreTest, TornJournalTailIsDropped) {
  TempDir dir;
  {
    AnnotationStore store(dir.path());
    store.Put(Record("e1", "a", "pass direct no_new fully"), true);
  }
  {
    std::ofstream out(dir.path() / "journal.jsonl", std::ios::app);
    out << R"({"seq":2,"revision":1,"rec)";
  }
  AnnotationStore store(dir.path());
  EXPECT_EQ(store.snapshot()->records.size(), 1u);
  store.Put(Record("e2", "a", "pass direct no_new fully"), true);
  AnnotationStore again(dir.path());
  EXPECT_EQ(again.snapshot()->records.size(), 2u);
}

TEST(StoreTest, CompactionKeepsStateAndHistory) {
  TempDir dir;
  std::string before;
  {
    AnnotationStore store(dir.path(), /*compact_every=*/4);
    for (int i = 0; i < 10; ++i) {
      store.Put(Record("e" + std::to_string(i % 3), "a",
                       i % 2 ? "pass direct no_new fully" : "fail - - -"),
                true);
    }
    before = store.snapshot()->Export();
    EXPECT_EQ(store.AuditTrail().size(), 10u);
  }
  EXPECT_LT(fs::file_size(dir.path() / "journal.jsonl"), fs::file_size(dir.path() / "audit.jsonl"));
  AnnotationStore reopened(dir.path());
  EXPECT_EQ(reopened.snapshot()->Export(), before);
  EXPECT_EQ(reopened.snapshot()->last_seq, 10);
  EXPECT_EQ(reopened.AuditTrail().size(), 10u);
}

TEST(StoreTest, CrashBetweenSnapshotAndTruncateReplaysOnce) {
  TempDir dir;
  std::string journal;
  {
    AnnotationStore store(dir.path());
    store.Put(Record("e1", "a", "pass direct no_new fully"), true);
    store.Put(Record("e1", "a", "pass unfocused no_new fully"), true);
    journal = ReadFile(dir.path() / "journal.jsonl");
    store.Compact();
  }
  // Simulate the journal surviving compaction.
  WriteFileAtomic(dir.path() / "journal.jsonl", journal);
  AnnotationStore store(dir.path());
  EXPECT_EQ(store.snapshot()->records.at({"e1", "a"}).revision, 2);
  EXPECT_EQ(store.Put(Record("e1", "a", "fail - - -"), true).revision, 3);
}

TEST(StoreTest, ExportRoundTripIsIdempotent) {
  TempDir a, b;
  AnnotationStore first(a.path());
  first.Put(Record("e2", "y", "pass direct answer_leak partially", "tricky \"quote\""), true);
  first.Put(Record("e1", "x", "fail - - -"), true);
  first.Put(Record("e1", "y", "pass not_answered hallucination not_grounded"), true);
  std::string exported = first.snapshot()->Export();
  AnnotationStore second(b.path());
  std::istringstream lines(exported);
  for (std::string line; std::getline(lines, line);) {
    second.Put(corpus::AnnotationFromJson(json::parse(line)), true);
  }
  EXPECT_EQ(second.snapshot()->Export(), exported);
  EXPECT_EQ(exported.substr(0, exported.find('\n')).find("\"edge_id\":\"e1\",\"annotator_id\":\"x\""),
            1u);
}

TEST(StoreTest, ConcurrentWritersAreSerialized) {
  TempDir dir;
  AnnotationStore store(dir.path(), /*compact_every=*/25);
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 20; ++i) {
        store.Put(Record("e" + std::to_string(i), "ann" + std::to_string(t),
                         "pass direct no_new fully"),
                  true);
        EXPECT_LE(store.snapshot()->records.size(), 160u);
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(store.snapshot()->records.size(), 160u);
  EXPECT_EQ(store.snapshot()->last_seq, 160);
  AnnotationStore reopened(dir.path());
  EXPECT_EQ(reopened.snapshot()->Export(), store.snapshot()->Export());
}

// ----------------------------------------------------------------- server

corpus::Corpus ServerCorpus() {
  corpus::Corpus c;
  std::vector<std::string> sentences;
  for (int i = 1; i <= 6; ++i) sentences.push_back("Sentence number " + std::to_string(i) + ".");
  c.documents.push_back(corpus::MakeDocument("d", sentences));
  std::mt19937 rng(2);
  for (int i = 0; i < 200; ++i) {
    corpus::QudEdge e;
    e.edge_id = "e" + std::to_string(i);
    e.doc_id = "d";
    e.question = "Question " + std::to_string(i) + "?";
    e.answer_idx = 2 + rng() % 5;
    e.anchor_idx = 1 + rng() % (e.answer_idx - 1);
    c.edges.push_back(e);
  }
  c.edges[2].anchor_idx = c.edges[2].answer_idx;  // ill-formed
  c.Reindex();
  return c;
}

class ServerTest : public ::testing::Test {
 protected:
  void Start(std::optional<fs::path> static_dir = std::nullopt) {
    Assignments assignments;
    for (int i = 0; i < 10; ++i) assignments.queues["alice"].push_back("e" + std::to_string(i));
    assignments.queues["bob"] = {"e0", "e1", "e2"};
    ServerConfig config;
    config.store_dir = store_.path();
    config.static_dir = static_dir;
    config.cors_origin = "http://localhost:5173";
    config.clock = [] { return std::chrono::sys_seconds{std::chrono::seconds{1700000000}}; };
    server_ = std::make_unique<AnnoServer>(ServerCorpus(), assignments, config);
    port_ = server_->Bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->Serve(); });
    server_->WaitUntilReady();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void StopServer() {
    if (!server_) return;
    server_->Stop();
    thread_.join();
    server_.reset();
  }

  void TearDown() override { StopServer(); }

  httplib::Result Post(const std::string& edge, const std::string& annotator,
                       const std::string& labels, std::optional<int> base = std::nullopt) {
    auto r = Record(edge, annotator, labels, "note");
    json body = {{"edge_id", edge}, {"annotator_id", annotator}, {"comment", "note"}};
    for (Criterion c : corpus::kAllCriteria) {
      body["labels"][std::string(corpus::CriterionName(c))] = r.labels.Name(c);
    }
    if (base) body["base_revision"] = *base;
    return client_->Post("/api/annotations", body.dump(), "application/json");
  }

  TempDir store_;
  std::unique_ptr<AnnoServer> server_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(ServerTest, NextTaskRolesAndProgress) {
  Start();
  auto res = client_->Get("/api/tasks/next?annotator=alice");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  json view = json::parse(res->body);
  EXPECT_EQ(view["edge_id"], "e0");
  EXPECT_EQ(view["ordinal"], 1);
  EXPECT_EQ(view["progress"]["total"], 10);
  int k = view["anchor_idx"], a = view["answer_idx"];
  for (const auto& s : view["sentences"]) {
    int i = s["index"];
    auto roles = s["roles"].get<std::vector<std::string>>();
    auto has = [&](const char* r) { return std::find(roles.begin(), roles.end(), r) != roles.end(); };
    EXPECT_EQ(has("prior-context"), i <= k);
    EXPECT_EQ(has("anchor"), i == k);
    EXPECT_EQ(has("answer"), i == a);
    EXPECT_EQ(has("post-context"), i > k && i != a);
  }
  EXPECT_EQ(view["options"]["comp"],
            (std::vector<std::string>{"direct", "unfocused", "not_answered"}));
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");

  EXPECT_EQ(client_->Get("/api/tasks/next?annotator=mallory")->status, 404);
  EXPECT_EQ(client_->Get("/api/progress?annotator=mallory")->status, 404);
  EXPECT_EQ(client_->Get("/api/tasks/next")->status, 400);

  for (const char* edge : {"e0", "e1", "e3"}) {
    EXPECT_EQ(Post(edge, "alice", "pass direct no_new fully")->status, 201);
  }
  json progress = json::parse(client_->Get("/api/progress?annotator=alice")->body);
  EXPECT_EQ(progress["completed"], 3);
  EXPECT_EQ(progress["total"], 10);
  EXPECT_TRUE(progress["tasks"][3]["completed"].get<bool>());
  EXPECT_FALSE(progress["tasks"][2]["completed"].get<bool>());
  EXPECT_FALSE(progress.contains("survey_code"));

  // e2 is ill-formed: the next task carries the forced-skip marker.
  json next = json::parse(client_->Get("/api/tasks/next?annotator=alice")->body);
  EXPECT_EQ(next["edge_id"], "e2");
  EXPECT_TRUE(next["forced_skip"].get<bool>());
}

TEST_F(ServerTest, SkipRulesAndValidation) {
  Start();
  EXPECT_EQ(Post("e0", "alice", "fail - - -")->status, 201);
  auto bad = Post("e1", "alice", "fail direct - -");
  EXPECT_EQ(bad->status, 422);
  EXPECT_EQ(json::parse(bad->body)["error"], "invariant_violation");
  EXPECT_EQ(Post("e2", "alice", "pass direct no_new fully")->status, 422);  // ill-formed
  EXPECT_EQ(Post("e2", "alice", "- - - -")->status, 201);
  EXPECT_EQ(Post("e50", "alice", "fail - - -")->status, 422);  // not assigned
  EXPECT_EQ(Post("nope", "alice", "fail - - -")->status, 404);
  EXPECT_EQ(Post("e0", "mallory", "fail - - -")->status, 404);
  EXPECT_EQ(client_->Post("/api/annotations", "{not json", "application/json")->status, 400);
  json wrong = {{"edge_id", "e0"},
                {"annotator_id", "alice"},
                {"labels", {{"lang", "pass"}, {"comp", "fully"}, {"givn", "no_new"}, {"relv", "fully"}}}};
  EXPECT_EQ(client_->Post("/api/annotations", wrong.dump(), "application/json")->status, 422);

  // Nothing stored violates skip propagation.
  for (const auto& a : server_->store().snapshot()->Annotations()) {
    const auto* edge = ServerCorpus().FindEdge(a.edge_id);
    EXPECT_FALSE(corpus::CheckSkipPropagation(a.labels, edge->well_formed()).has_value());
  }
}

TEST_F(ServerTest, CompletionSurveyCodeAndEmptyQueue) {
  Start();
  for (const char* edge : {"e0", "e1"}) Post(edge, "bob", "pass direct no_new fully");
  auto last = Post("e2", "bob", "- - - -");
  ASSERT_EQ(last->status, 201);
  std::string code = SurveyCode("bob", {"e0", "e1", "e2"});
  EXPECT_EQ(json::parse(last->body)["survey_code"], code);
  EXPECT_EQ(code.size(), 12u);
  EXPECT_EQ(code.substr(0, 4), "QUD-");
  EXPECT_EQ(client_->Get("/api/tasks/next?annotator=bob")->status, 204);
  json progress = json::parse(client_->Get("/api/progress?annotator=bob")->body);
  EXPECT_EQ(progress["survey_code"], code);
  EXPECT_NE(SurveyCode("alice", {"e0", "e1", "e2"}), code);
}

TEST_F(ServerTest, ConflictIsLastWriterWinsWithAudit) {
  Start();
  ASSERT_EQ(Post("e0", "alice", "pass direct no_new fully", 0)->status, 201);
  auto conflict = Post("e0", "alice", "pass unfocused no_new fully", 0);
  EXPECT_EQ(conflict->status, 409);
  json body = json::parse(conflict->body);
  EXPECT_EQ(body["resolution"], "last_writer_wins");
  EXPECT_EQ(body["revision"], 2);
  std::string exported = client_->Get("/api/export")->body;
  EXPECT_NE(exported.find("\"comp\":\"unfocused\""), std::string::npos);
  auto audit = server_->store().AuditTrail();
  ASSERT_EQ(audit.size(), 2u);
  EXPECT_TRUE(audit[1]["conflict"].get<bool>());
  EXPECT_EQ(Post("e0", "alice", "pass direct no_new fully")->status, 201);
}

TEST_F(ServerTest, ExportIsStableAndSurvivesRestart) {
  Start();
  EXPECT_EQ(client_->Get("/api/export")->body, "");
  Post("e1", "alice", "pass direct no_new fully");
  Post("e0", "bob", "fail - - -");
  std::string first = client_->Get("/api/export")->body;
  EXPECT_EQ(client_->Get("/api/export")->body, first);
  EXPECT_LT(first.find("\"edge_id\":\"e0\""), first.find("\"edge_id\":\"e1\""));
  StopServer();
  Start();
  EXPECT_EQ(client_->Get("/api/export")->body, first);
  EXPECT_EQ(json::parse(client_->Get("/api/progress?annotator=alice")->body)["completed"], 1);
}

TEST_F(ServerTest, AgreementMatchesAssessOracle) {
  Start();
  Post("e0", "alice", "pass direct no_new fully");
  json single = json::parse(client_->Get("/api/agreement")->body);
  EXPECT_EQ(single["status"], "insufficient_annotators");

  // 3 annotators x 200 edges written straight to the store.
  std::mt19937 rng(31);
  const char* comp[] = {"direct", "unfocused", "not_answered"};
  const char* givn[] = {"no_new", "answer_leak", "hallucination"};
  const char* relv[] = {"fully", "partially", "not_grounded"};
  auto c = ServerCorpus();
  for (const auto& e : c.edges) {
    int base = rng() % 3;
    for (const char* ann : {"x", "y", "z"}) {
      std::string labels = "- - - -";
      if (e.well_formed()) {
        int v = rng() % 4 == 0 ? rng() % 3 : base;
        labels = rng() % 10 == 0 ? "fail - - -"
                                 : std::string("pass ") + comp[v] + " " + givn[v] + " " + relv[v];
      }
      server_->store().Put(Record(e.edge_id, ann, labels), e.well_formed());
    }
  }
  json got = json::parse(client_->Get("/api/agreement")->body);
  corpus::Corpus labeled;
  labeled.annotations = server_->store().snapshot()->Annotations();
  json expected = assess::AgreementToJson(assess::BuildAgreementReport(labeled));
  EXPECT_EQ(got, expected);
  EXPECT_EQ(got["edges"], 200);
  for (const auto& row : got["rows"]) EXPECT_LE(row["alpha"].get<double>(), 1.0);
}

TEST_F(ServerTest, CorsPreflightAndStaticRoute) {
  TempDir assets;
  {
    std::ofstream out(assets.path() / "index.html");
    out << "<!doctype html><title>annotate</title>";
  }
  Start(assets.path());
  auto pre = client_->Options("/api/annotations");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  auto page = client_->Get("/index.html");
  ASSERT_TRUE(page);
  EXPECT_EQ(page->status, 200);
  EXPECT_EQ(page->body, "<!doctype html><title>annotate</title>");
  EXPECT_EQ(client_->Get("/")->body, "<!doctype html><title>annotate</title>");
}

TEST(AssignmentsTest, LoadAndValidate) {
  TempDir dir;
  {
    std::ofstream out(dir.path() / "a.json");
    out << R"({"alice": ["e0", "e1"], "bob": ["e5"]})";
  }
  auto a = Assignments::Load(dir.path() / "a.json");
  EXPECT_EQ(a.queues.at("alice"), (std::vector<std::string>{"e0", "e1"}));
  EXPECT_NO_THROW(a.Validate(ServerCorpus()));
  a.queues["carol"] = {"missing"};
  EXPECT_THROW(a.Validate(ServerCorpus()), Error);
  a.queues["carol"] = {"e0", "e0"};
  EXPECT_THROW(a.Validate(ServerCorpus()), Error);
}

}  // namespace
}  // namespace qudeval::annoserve
