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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>
#include <vector>

#include "httplib.h"
#include "qudeval/common/error.h"
#include "qudeval/common/files.h"
#include "qudeval/llmgate/gateway.h"
#include "qudeval/llmgate/parse.h"
#include "qudeval/llmgate/prompts.h"

namespace qudeval::llmgate {
namespace {

namespace fs = std::filesystem;

const fs::path kSourceDir = QUDEVAL_SOURCE_DIR;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("qudeval_llmgate_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// ---------------------------------------------------------------- prompts

TEST(PromptTest, EveryTemplateMatchesItsGolden) {
  auto slots = nlohmann::json::parse(ReadFile(kSourceDir / "tests/golden/slots.json"));
  const auto& library = PromptLibrary::Default();
  std::vector<std::string> covered;
  for (const auto& [id, values] : slots.items()) {
    Slots s;
    for (const auto& [k, v] : values.items()) s[k] = v.get<std::string>();
    EXPECT_EQ(library.Render(id, s), ReadFile(kSourceDir / "tests/golden" / (id + ".txt"))) << id;
    covered.push_back(id);
  }
  std::sort(covered.begin(), covered.end());
  EXPECT_EQ(covered, library.ids());
}

TEST(PromptTest, EmbeddedAndOnDiskTemplatesAgree) {
  auto disk = PromptLibrary::FromDirectory(kSourceDir / "data/prompts");
  const auto& embedded = PromptLibrary::Default();
  ASSERT_EQ(disk.ids(), embedded.ids());
  for (const auto& id : disk.ids()) {
    EXPECT_EQ(disk.Get(id).body, embedded.Get(id).body) << id;
    EXPECT_EQ(disk.Get(id).required_slots, embedded.Get(id).required_slots) << id;
  }
}

TEST(PromptTest, CarriesOriginalInstructionWording) {
  const auto& lib = PromptLibrary::Default();
  struct Case {
    const char* id;
    const char* wording;
  };
  const Case cases[] = {
      {kQuestionGenTemplate, "The Target Answer given should be the answer to the generated question."},
      {kQuestionGenTemplate, "generate a question that indicates how the Target Answer elaborates on earlier sentences"},
      {kQuestionGenTemplate, "Question: How much did the prices of long-term Treasury bonds increase?"},
      {kAnchorTemplate, "pick a sentence from the Context such that the above Question arises from it"},
      {kAnchorTemplate, "The Target Answer cannot be the Anchor Sentence."},
      {kCompScoreTemplate, "give a score between 1 to 100 for how well the answer actually answers the question."},
      {kGptAnsClosestTemplate, "Which sentence in the article is closest to the sentence: '"},
      {kSimilarityTemplate, "where a score of 1 means 'no similarity' and a score of 5 means 'similar intent and phrasing'"},
      {kGivnZeroShotTemplate, "Answer leakage: The question contains new concepts that are in the answer sentence AND not in the context."},
      {kGivnZeroShotTemplate, "1: No new concepts\n2: Answer leakage\n3: Hallucination"},
      {kGivnFewShotTemplate, "What does the report say is the reason for the export ban?"},
      {kGivnFewShotTemplate, "Selected option:\n[3: Hallucination]"},
      {kRelvZeroShotTemplate, "If the question refers to the same entity as the anchor, we consider the question to be grounded."},
      {kRelvFewShotTemplate, "Result: [1: The question is fully grounded in the anchor sentence.]"},
      {kRelvScoreTemplate, "give a score between 1 to 100 for how confident you are about the question is grounded in anchor sentence."},
  };
  for (const auto& c : cases) {
    EXPECT_NE(lib.Get(c.id).body.find(c.wording), std::string::npos) << c.id << ": " << c.wording;
  }
}

TEST(PromptTest, SlotsAndRenderingRules) {
  const auto& lib = PromptLibrary::Default();
  EXPECT_EQ(lib.Get(kQuestionGenTemplate).required_slots,
            (std::set<std::string>{"answer", "context"}));
  EXPECT_EQ(lib.Get(kSimilarityTemplate).required_slots,
            (std::set<std::string>{"candidate", "context", "reference"}));
  EXPECT_EQ(CodeOf([&] { lib.Render(kQuestionGenTemplate, {{"context", "c"}}); }),
            ErrorCode::kMissingSlot);
  EXPECT_EQ(CodeOf([&] { lib.Render("no-such-template", {}); }), ErrorCode::kUnknownTemplate);

  auto t = ParseTemplate("t", "a {{x}} b {{y}}{{x}}", "inline");
  EXPECT_EQ(RenderTemplate(t, {{"x", "{{y}}"}, {"y", "2"}, {"unused", "z"}}), "a {{y}} b 2{{y}}");
  EXPECT_EQ(CodeOf([] { ParseTemplate("t", "a {{x", "inline"); }), ErrorCode::kInvariantViolation);
  EXPECT_EQ(CodeOf([] { ParseTemplate("t", "a {{}} b", "inline"); }), ErrorCode::kInvariantViolation);

  for (const auto& id : lib.ids()) {
    Slots s;
    for (const auto& name : lib.Get(id).required_slots) s[name] = "value";
    EXPECT_EQ(lib.Render(id, s).find("{{"), std::string::npos) << id;
  }
}

// ---------------------------------------------------------------- parsing

const std::vector<std::string> kGivnOptions = {"No new concepts", "Answer leakage", "Hallucination"};
const std::vector<std::string> kRelvOptions = {"fully grounded", "Some parts of the question",
                                               "not grounded at all"};

TEST(ParseOptionTest, Rules) {
  EXPECT_EQ(ParseOption("[3: Hallucination]", kGivnOptions), 3);
  EXPECT_EQ(ParseOption("Selected option:\n[1: No new concepts]", kGivnOptions), 1);
  EXPECT_EQ(ParseOption("[2]", kGivnOptions), 2);
  EXPECT_EQ(ParseOption("2", kGivnOptions), 2);
  EXPECT_EQ(ParseOption(" 1: No new concepts", kGivnOptions), 1);
  EXPECT_EQ(ParseOption("It is answer leakage, clearly.", kGivnOptions), 2);
  EXPECT_EQ(ParseOption("I think option 2 fits best", kGivnOptions), 2);
  EXPECT_EQ(ParseOption("The question is not grounded at all in the anchor sentence.", kRelvOptions), 3);
  // Out-of-range brackets fall through to later rules.
  EXPECT_EQ(ParseOption("[7: none] Hallucination", kGivnOptions), 3);
  EXPECT_EQ(CodeOf([] { ParseOption("neither applies", kGivnOptions); }),
            ErrorCode::kUnparseableResponse);
  EXPECT_EQ(CodeOf([] { ParseOption("between 1 and 3", kGivnOptions); }),
            ErrorCode::kUnparseableResponse);
  EXPECT_EQ(CodeOf([] { ParseOption("version 2.5 of the model", kGivnOptions); }),
            ErrorCode::kUnparseableResponse);
  EXPECT_EQ(CodeOf([] { ParseOption("1", {}); }), ErrorCode::kInvariantViolation);
}

TEST(ParseScoreTest, Rules) {
  EXPECT_DOUBLE_EQ(ParseScore("Score: 3.5", 1, 5).value, 3.5);
  EXPECT_DOUBLE_EQ(ParseScore("85/100", 1, 100).value, 85);
  EXPECT_DOUBLE_EQ(ParseScore("5", 1, 5).value, 5);
  auto high = ParseScore("I would give it 150.", 1, 100);
  EXPECT_TRUE(high.clamped);
  EXPECT_DOUBLE_EQ(high.value, 100);
  EXPECT_DOUBLE_EQ(high.raw, 150);
  EXPECT_FALSE(ParseScore("score 42", 1, 100).clamped);
  EXPECT_EQ(CodeOf([] { ParseScore("very similar", 1, 5); }), ErrorCode::kNonNumericResponse);
}

TEST(FirstLineTest, Rules) {
  EXPECT_EQ(FirstLine("Question: Why did X?\n", "Question"), "Why did X?");
  EXPECT_EQ(FirstLine("\n\n  Question:\n  \"Why did X?\"\nmore", "Question"), "Why did X?");
  EXPECT_EQ(FirstLine("How much did prices rise?", "Question"), "How much did prices rise?");
  EXPECT_EQ(FirstLine("   \n\t\n", "Question"), "");
}

// ---------------------------------------------------------------- gateway

LlmRequest Request(std::string prompt) {
  LlmRequest r;
  r.model = "m";
  r.prompt = std::move(prompt);
  return r;
}

std::string CompletionBody(const std::string& text) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}},
                        {"usage", {{"prompt_tokens", 11}, {"completion_tokens", 3}}}}
      .dump();
}

// Answers "echo:<prompt>" after an optional delay; scripted statuses first.
class FakeTransport : public Transport {
 public:
  explicit FakeTransport(std::vector<int> statuses = {}, int delay_ms = 0)
      : statuses_(std::move(statuses)), delay_ms_(delay_ms) {}

  TransportResult Send(const LlmRequest& request) override {
    int now = ++active_;
    int seen = max_active_.load();
    while (now > seen && !max_active_.compare_exchange_weak(seen, now)) {
    }
    if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    int call = calls_++;
    --active_;
    if (call < static_cast<int>(statuses_.size()) && statuses_[call] != 200) {
      return {statuses_[call], "scripted failure", ""};
    }
    return {200, CompletionBody("echo:" + request.prompt), ""};
  }

  int calls() const { return calls_.load(); }
  int max_active() const { return max_active_.load(); }

 private:
  std::vector<int> statuses_;
  int delay_ms_;
  std::atomic<int> calls_{0};
  std::atomic<int> active_{0};
  std::atomic<int> max_active_{0};
};

GatewayConfig TestConfig(Mode mode, const fs::path& fixtures) {
  GatewayConfig c;
  c.mode = mode;
  c.model = "m";
  c.fixture_dir = fixtures;
  c.backoff_ms = 1;
  return c;
}

TEST(CacheKeyTest, CanonicalAndStable) {
  auto r = Request("p");
  EXPECT_EQ(r.Canonical().dump(), R"({"max_tokens":256,"model":"m","prompt":"p","temperature":0.0})");
  EXPECT_EQ(r.CacheKey(), "7a689fed38aa0b870971a1cbef1d93cc39383c3ab38cff3864cd539d1c0647d7");
  EXPECT_EQ(nlohmann::json::parse(r.Canonical().dump()).dump(), r.Canonical().dump());
  EXPECT_NE(Request("p ").CacheKey(), r.CacheKey());
  auto longer = r;
  longer.max_tokens = 512;
  EXPECT_NE(longer.CacheKey(), r.CacheKey());
  EXPECT_EQ(FixturePath("fx", r.CacheKey()),
            fs::path("fx") / "7a" / (r.CacheKey() + ".json"));
}

TEST(GatewayTest, ReplayServesFixturesWithoutNetwork) {
  TempDir dir;
  auto* fake = new FakeTransport();
  Gateway gw(TestConfig(Mode::kReplay, dir.path()), std::unique_ptr<Transport>(fake));
  LlmResponse stored;
  stored.text = "[3: Hallucination]";
  gw.StoreFixture(Request("q"), stored);
  EXPECT_TRUE(fs::exists(FixturePath(dir.path(), Request("q").CacheKey())));

  auto r = gw.Complete(Request("q"));
  EXPECT_EQ(r.text, "[3: Hallucination]");
  EXPECT_TRUE(r.cached);
  EXPECT_EQ(gw.Complete(Request("q")).text, r.text);

  try {
    gw.Complete(Request("missing"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFixtureMiss);
    EXPECT_NE(std::string(e.what()).find(Request("missing").CacheKey()), std::string::npos);
  }
  EXPECT_EQ(fake->calls(), 0);
  EXPECT_EQ(gw.network_calls(), 0);
}

TEST(GatewayTest, ReplayNeedsNoApiKey) {
  ::unsetenv("QUDEVAL_TEST_ABSENT_KEY");
  GatewayConfig c = TestConfig(Mode::kReplay, "unused");
  c.api_key_env = "QUDEVAL_TEST_ABSENT_KEY";
  EXPECT_NO_THROW(Gateway{c});
  c.mode = Mode::kLive;
  EXPECT_EQ(CodeOf([&] { Gateway g(c); }), ErrorCode::kProviderUnavailable);
}

TEST(GatewayTest, LiveCachesIdenticalRequests) {
  TempDir dir;
  auto* fake = new FakeTransport();
  Gateway gw(TestConfig(Mode::kLive, dir.path()), std::unique_ptr<Transport>(fake));
  auto first = gw.Complete(Request("hello"));
  auto second = gw.Complete(Request("hello"));
  EXPECT_EQ(first.text, "echo:hello");
  EXPECT_FALSE(first.cached);
  EXPECT_EQ(first.prompt_tokens, 11);
  EXPECT_EQ(second.text, first.text);
  EXPECT_TRUE(second.cached);
  EXPECT_EQ(fake->calls(), 1);
  EXPECT_FALSE(fs::exists(FixturePath(dir.path(), Request("hello").CacheKey())));
}

TEST(GatewayTest, RecordPersistsThenReplays) {
  TempDir dir;
  {
    Gateway rec(TestConfig(Mode::kRecord, dir.path()), std::make_unique<FakeTransport>());
    EXPECT_EQ(rec.Complete(Request("a")).text, "echo:a");
  }
  Gateway replay(TestConfig(Mode::kReplay, dir.path()));
  auto r = replay.Complete(Request("a"));
  EXPECT_EQ(r.text, "echo:a");
  EXPECT_EQ(r.completion_tokens, 3);
  EXPECT_TRUE(r.cached);
}

TEST(GatewayTest, RetriesThenSucceeds) {
  auto* fake = new FakeTransport({500, 0});
  Gateway gw(TestConfig(Mode::kLive, "unused"), std::unique_ptr<Transport>(fake));
  EXPECT_EQ(gw.Complete(Request("x")).text, "echo:x");
  EXPECT_EQ(fake->calls(), 3);
}

TEST(GatewayTest, ErrorsAfterRetries) {
  {
    auto* fake = new FakeTransport({503, 503, 503, 503});
    Gateway gw(TestConfig(Mode::kLive, "unused"), std::unique_ptr<Transport>(fake));
    EXPECT_EQ(CodeOf([&] { gw.Complete(Request("x")); }), ErrorCode::kProviderError);
    EXPECT_EQ(fake->calls(), 3);
  }
  {
    auto* fake = new FakeTransport({429, 429, 429});
    Gateway gw(TestConfig(Mode::kLive, "unused"), std::unique_ptr<Transport>(fake));
    EXPECT_EQ(CodeOf([&] { gw.Complete(Request("x")); }), ErrorCode::kRateLimited);
    EXPECT_EQ(fake->calls(), 3);
  }
  {
    auto* fake = new FakeTransport({400});
    Gateway gw(TestConfig(Mode::kLive, "unused"), std::unique_ptr<Transport>(fake));
    EXPECT_EQ(CodeOf([&] { gw.Complete(Request("x")); }), ErrorCode::kProviderError);
    EXPECT_EQ(fake->calls(), 1);
    // Failures are not cached.
    EXPECT_EQ(gw.Complete(Request("x")).text, "echo:x");
  }
}

TEST(GatewayTest, BoundsConcurrency) {
  auto* fake = new FakeTransport({}, 20);
  Gateway gw(TestConfig(Mode::kLive, "unused"), std::unique_ptr<Transport>(fake));
  std::vector<std::thread> threads;
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&gw, i] { gw.Complete(Request("p" + std::to_string(i))); });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(fake->calls(), 16);
  EXPECT_LE(fake->max_active(), 4);
  EXPECT_GE(fake->max_active(), 2);
}

TEST(GatewayTest, DeduplicatesInFlightRequests) {
  auto* fake = new FakeTransport({}, 50);
  Gateway gw(TestConfig(Mode::kLive, "unused"), std::unique_ptr<Transport>(fake));
  std::vector<std::thread> threads;
  std::atomic<int> cached{0};
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      if (gw.Complete(Request("same")).cached) ++cached;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(fake->calls(), 1);
  EXPECT_EQ(cached.load(), 7);
}

TEST(HttpTransportTest, SpeaksChatCompletions) {
  httplib::Server server;
  nlohmann::json seen;
  std::string auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(CompletionBody("1"), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("QUDEVAL_TEST_KEY", "sk-test", 1);
  GatewayConfig c = TestConfig(Mode::kLive, "unused");
  c.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  c.api_key_env = "QUDEVAL_TEST_KEY";
  Gateway gw(c);
  auto r = gw.Complete("Say 1");
  server.stop();
  t.join();

  EXPECT_EQ(r.text, "1");
  EXPECT_EQ(auth, "Bearer sk-test");
  EXPECT_EQ(seen["model"], "m");
  EXPECT_EQ(seen["temperature"], 0.0);
  EXPECT_EQ(seen["messages"][0]["content"], "Say 1");
  EXPECT_EQ(gw.network_calls(), 1);
}

TEST(HttpTransportTest, UnreachableProvider) {
  HttpTransport transport("http://127.0.0.1:9", "", 2);
  EXPECT_EQ(transport.Send(Request("x")).status, 0);
}

TEST(GatewayConfigTest, LoadsFileAndResolvesFixtureDir) {
  TempDir dir;
  {
    std::ofstream out(dir.path() / "llm.json");
    out << R"({"model": "gpt-4", "mode": "record", "fixture_dir": "fx", "max_in_flight": 2})";
  }
  auto c = LoadGatewayConfig(dir.path() / "llm.json");
  EXPECT_EQ(c.model, "gpt-4");
  EXPECT_EQ(c.mode, Mode::kRecord);
  EXPECT_EQ(c.fixture_dir, dir.path() / "fx");
  EXPECT_EQ(c.max_in_flight, 2);
  EXPECT_EQ(c.max_attempts, 3);
  {
    std::ofstream out(dir.path() / "bad.json");
    out << R"({"mode": "offline"})";
  }
  EXPECT_EQ(CodeOf([&] { LoadGatewayConfig(dir.path() / "bad.json"); }),
            ErrorCode::kSchemaViolation);
}

}  // namespace
}  // namespace qudeval::llmgate
