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

#include <filesystem>
#include <functional>

#include "qudeval/common/error.h"
#include "qudeval/metrics/llm.h"

namespace qudeval::metrics {
namespace {

namespace fs = std::filesystem;
using corpus::MakeDocument;
using llmgate::GatewayConfig;
using llmgate::LlmRequest;
using llmgate::Mode;
using llmgate::Transport;
using llmgate::TransportResult;

// Replies through a callback on the prompt text and records every prompt.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::function<std::string(const std::string&)> reply)
      : reply_(std::move(reply)) {}
  TransportResult Send(const LlmRequest& request) override {
    prompts.push_back(request.prompt);
    nlohmann::json body = {{"choices", {{{"message", {{"content", reply_(request.prompt)}}}}}}};
    return {200, body.dump(), ""};
  }
  std::vector<std::string> prompts;

 private:
  std::function<std::string(const std::string&)> reply_;
};

struct Harness {
  explicit Harness(std::function<std::string(const std::string&)> reply) {
    auto t = std::make_unique<ScriptedTransport>(std::move(reply));
    transport = t.get();
    GatewayConfig c;
    c.mode = Mode::kLive;
    c.model = "test-model";
    c.backoff_ms = 1;
    gateway = std::make_unique<Gateway>(c, std::move(t));
  }
  ScriptedTransport* transport;
  std::unique_ptr<Gateway> gateway;
};

Harness Fixed(std::string reply) {
  return Harness([reply](const std::string&) { return reply; });
}

corpus::QudEdge Edge(std::string question, int k, int a) {
  corpus::QudEdge e;
  e.edge_id = "e1";
  e.doc_id = "d";
  e.question = std::move(question);
  e.anchor_idx = k;
  e.answer_idx = a;
  return e;
}

const Document kNuclear = MakeDocument(
    "nuclear",
    {"U.S. exports of nuclear material cannot be adequately traced from country to country, "
     "according to a congressional report.",
     "The report says hundreds of tons of plutonium and highly enriched uranium have accumulated "
     "worldwide, mostly from nuclear power generation."});
const corpus::QudEdge kExportBan =
    Edge("What does the report say is the reason for the export ban?", 1, 2);

const Document kSharks = MakeDocument(
    "sharks",
    {"FORT LAUDERDALE, Fla. - Researchers are looking to the sun to give hunted and overfished "
     "sharks a new ray of hope.",
     "Using a special solar-powered tag, marine scientists now can study a shark's movements for "
     "up to two years by way of data beamed to satellites.",
     "Previously, researchers relied on tags that ran on batteries and sometimes died before all "
     "the information could be transmitted."});

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

// ------------------------------------------------------------ classifiers

TEST(LlmClassifyTest, FewShotGivennessExemplar) {
  auto h = Fixed("Selected option:\n[3: Hallucination]");
  auto v = LlmClassify(kExportBan, kNuclear, Criterion::kGivn, Shots::kFew, *h.gateway);
  EXPECT_EQ(v.label, "hallucination");
  EXPECT_EQ(v.metric_id, "gpt-cls-fs-givn");
  EXPECT_FALSE(v.raw_score.has_value());
  ASSERT_EQ(h.transport->prompts.size(), 1u);
  const auto& prompt = h.transport->prompts[0];
  EXPECT_NE(prompt.find("Context:\n1 U.S. exports of nuclear material"), std::string::npos);
  EXPECT_TRUE(prompt.ends_with("Selected option:"));
  EXPECT_EQ(v.provenance, "model:test-model;template:gpt-cls-fs-givn;key:" +
                              (LlmRequest{"test-model", prompt}).CacheKey());
}

TEST(LlmClassifyTest, ReplayedFixtureAndLenientScan) {
  fs::path dir = fs::temp_directory_path() / ("qudeval_llm_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  GatewayConfig c;
  c.mode = Mode::kReplay;
  c.model = "test-model";
  c.fixture_dir = dir;
  Gateway replay(c);
  std::string prompt = PromptLibrary::Default().Render(
      "gpt-cls-zs-givn", {{"context", NumberedContext(kNuclear, 1)},
                          {"question", kExportBan.question},
                          {"answer", kNuclear.Sentence(2)}});
  llmgate::LlmResponse stored;
  stored.text = "1: No new concepts";
  replay.StoreFixture({"test-model", prompt}, stored);
  auto v = LlmClassify(kExportBan, kNuclear, Criterion::kGivn, Shots::kZero, replay);
  EXPECT_EQ(v.label, "no_new");
  EXPECT_EQ(replay.network_calls(), 0);
  fs::remove_all(dir);

  auto h = Fixed("I think option 2 fits best");
  EXPECT_EQ(LlmClassify(kExportBan, kNuclear, Criterion::kGivn, Shots::kZero, *h.gateway).label,
            "answer_leak");
}

TEST(LlmClassifyTest, RelevanceUsesAnchorOnly) {
  auto h = Fixed("[1: The question is fully grounded in the anchor sentence.]");
  auto v = LlmClassify(kExportBan, kNuclear, Criterion::kRelv, Shots::kZero, *h.gateway);
  EXPECT_EQ(v.label, "fully");
  const auto& prompt = h.transport->prompts.at(0);
  EXPECT_NE(prompt.find("Anchor Sentence:\n" + kNuclear.Sentence(1)), std::string::npos);
  EXPECT_EQ(prompt.find("plutonium"), std::string::npos);
}

TEST(LlmClassifyTest, OneStricterReprompt) {
  Harness h([](const std::string& p) {
    return p.find("Reply with exactly one line") != std::string::npos
               ? "[2: Some parts of the question are grounded in the anchor sentence.]"
               : "Hard to say.";
  });
  auto v = LlmClassify(kExportBan, kNuclear, Criterion::kRelv, Shots::kFew, *h.gateway);
  EXPECT_EQ(v.label, "partially");
  EXPECT_EQ(h.transport->prompts.size(), 2u);

  auto stubborn = Fixed("neither applies");
  EXPECT_EQ(CodeOf([&] {
              LlmClassify(kExportBan, kNuclear, Criterion::kGivn, Shots::kZero, *stubborn.gateway);
            }),
            ErrorCode::kUnparseableResponse);
  EXPECT_EQ(stubborn.transport->prompts.size(), 2u);
}

TEST(LlmClassifyTest, SkipsIllFormedAndRejectsOtherCriteria) {
  auto h = Fixed("1");
  auto v = LlmClassify(Edge("Why?", 2, 2), kNuclear, Criterion::kGivn, Shots::kZero, *h.gateway);
  EXPECT_EQ(v.label, "skipped");
  EXPECT_TRUE(h.transport->prompts.empty());
  EXPECT_EQ(CodeOf([&] {
              LlmClassify(kExportBan, kNuclear, Criterion::kComp, Shots::kZero, *h.gateway);
            }),
            ErrorCode::kUsage);
}

// ---------------------------------------------------------------- scorers

TEST(LlmScoreTest, DefaultMappings) {
  struct Case {
    Criterion c;
    const char* reply;
    const char* label;
    double raw;
  };
  const Case cases[] = {
      {Criterion::kRelv, "85", "fully", 85},
      {Criterion::kComp, "100", "direct", 100},
      {Criterion::kComp, "Score: 70", "unfocused", 70},
      {Criterion::kComp, "45", "not_answered", 45},
      {Criterion::kRelv, "I'd say 20.", "partially", 20},
  };
  for (const auto& c : cases) {
    auto h = Fixed(c.reply);
    auto mapping = c.c == Criterion::kComp ? MappingFunction::CompScoreDefault()
                                           : MappingFunction::RelvScoreDefault();
    auto v = LlmScore(kExportBan, kNuclear, c.c, mapping, *h.gateway);
    EXPECT_EQ(v.label, c.label) << c.reply;
    EXPECT_DOUBLE_EQ(*v.raw_score, c.raw);
    EXPECT_NE(v.provenance.find(";mapping:" + mapping.id()), std::string::npos);
  }
}

TEST(LlmScoreTest, ClampsAndRejectsNonNumeric) {
  auto h = Fixed("150");
  auto v = LlmScore(kExportBan, kNuclear, Criterion::kComp, MappingFunction::CompScoreDefault(),
                    *h.gateway);
  EXPECT_EQ(v.label, "direct");
  EXPECT_DOUBLE_EQ(*v.raw_score, 100);
  EXPECT_TRUE(v.provenance.ends_with(";clamped"));
  // The whole article goes into the answer-compatibility prompt.
  EXPECT_NE(h.transport->prompts[0].find("article: " + kNuclear.FullText()), std::string::npos);

  auto bad = Fixed("It answers it well.");
  EXPECT_EQ(CodeOf([&] {
              LlmScore(kExportBan, kNuclear, Criterion::kComp,
                       MappingFunction::CompScoreDefault(), *bad.gateway);
            }),
            ErrorCode::kNonNumericResponse);
}

// ---------------------------------------------------------------- GPT-Ans

const char kSolarAnswer[] =
    "Researchers are studying the movements of sharks using a special solar-powered tag that can "
    "transmit data to satellites for up to two years.";

Harness SharkHarness(std::string closest) {
  return Harness([closest](const std::string& p) -> std::string {
    if (p.find("Which sentence in the article is closest") != std::string::npos) return closest;
    return std::string("answer: ") + kSolarAnswer;
  });
}

TEST(GptAnsTest, SolarTagAnswerMatchesSecondSentence) {
  auto h = SharkHarness("'Using a special solar-powered tag, marine scientists now can study a "
                        "shark's movements for up to two years by way of data beamed to "
                        "satellites.'");
  auto q = Edge("How are researchers using the sun to help sharks?", 1, 2);
  auto d = GptAnsCompatibilityDetail(q, kSharks, *h.gateway);
  EXPECT_EQ(d.generated_answer, kSolarAnswer);
  EXPECT_EQ(d.matched_idx, 2);
  EXPECT_EQ(d.label, "answered");
  ASSERT_EQ(h.transport->prompts.size(), 2u);
  EXPECT_NE(h.transport->prompts[1].find(std::string("closest to the sentence: '") + kSolarAnswer +
                                         "'"),
            std::string::npos);

  auto v = GptAnsCompatibility(Edge(q.question, 1, 3), kSharks, *h.gateway);
  EXPECT_EQ(v.label, "not_answered");
  EXPECT_EQ(v.criterion, Criterion::kComp);
  EXPECT_NO_THROW(ValidateVerdictLabel(v));
}

TEST(GptAnsTest, ParaphrasedReplyFallsBackToOverlap) {
  auto h = SharkHarness("The one about scientists beaming data to satellites.");
  EXPECT_EQ(GptAnsCompatibilityDetail(Edge("Why?", 1, 2), kSharks, *h.gateway).matched_idx, 2);
  EXPECT_EQ(MatchSentence(kSharks, "Sentence 3: Previously, researchers relied on tags that ran "
                                   "on batteries and sometimes died before all the information "
                                   "could be transmitted."),
            3);
  EXPECT_EQ(CodeOf([] { MatchSentence(kSharks, "Zebra."); }), ErrorCode::kNoSentenceMatch);
}

// ------------------------------------------------------------- similarity

TEST(LlmSimilarityTest, ParsesAndClamps) {
  QuestionPair same{"e1", "What is the rationale for limiting the pretrial forfeitures?",
                    "What is the rationale for limiting the pretrial forfeitures?"};
  auto h = Fixed("5");
  EXPECT_DOUBLE_EQ(LlmSimilarity(same, "ctx", *h.gateway), 5.0);
  EXPECT_NE(h.transport->prompts[0].find("Reference Question: " + same.reference),
            std::string::npos);

  QuestionPair forfeit{"e2", "In what way are forfeitures limited now?",
                       "What is the rationale for limiting the pretrial forfeitures?"};
  auto off = Fixed("Score: 3.5");
  EXPECT_DOUBLE_EQ(LlmSimilarity(forfeit, "ctx", *off.gateway), 3.5);
  auto high = Fixed("7");
  EXPECT_DOUBLE_EQ(LlmSimilarity(forfeit, "ctx", *high.gateway), 5.0);
  auto words = Fixed("quite similar");
  EXPECT_EQ(CodeOf([&] { LlmSimilarity(forfeit, "ctx", *words.gateway); }),
            ErrorCode::kNonNumericResponse);
}

}  // namespace
}  // namespace qudeval::metrics
