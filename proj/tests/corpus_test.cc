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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "qudeval/common/error.h"
#include "qudeval/common/files.h"

namespace qudeval::corpus {
namespace {

namespace fs = std::filesystem;

constexpr char kDocs[] =
    R"({"doc_id":"d1","sentences":[{"index":1,"text":"Bond prices fell."},{"index":2,"text":"Rates rose."},{"index":3,"text":"Buyers were cautious."}],"split_tag":"test"})"
    "\n"
    R"({"doc_id":"d2","sentences":[{"index":1,"text":"Sharks swim."},{"index":2,"text":"Makos are fast."}],"split_tag":"train-held-out"})"
    "\n";

constexpr char kEdges[] =
    R"({"edge_id":"e1","doc_id":"d1","question":"Why did prices fall?","anchor_idx":1,"answer_idx":2,"system":"gpt4"})"
    "\n"
    R"({"edge_id":"e2","doc_id":"d1","question":"Who was cautious?","anchor_idx":3,"answer_idx":3,"system":"chatgpt"})"
    "\n"
    R"({"edge_id":"e3","doc_id":"d2","question":"How fast are makos?","anchor_idx":1,"answer_idx":2,"system":"dcqa-human"})"
    "\n"
    R"({"edge_id":"e4","doc_id":"d2","question":"What swims?","anchor_idx":1,"answer_idx":2,"system":"custom:mine"})"
    "\n";

constexpr char kLabels[] =
    R"({"edge_id":"e1","annotator_id":"a1","lang":"pass","comp":"direct","givn":"no_new","relv":"fully","comment":"","timestamp":"2024-01-31T12:00:00Z"})"
    "\n"
    R"({"edge_id":"e1","annotator_id":"a2","lang":"pass","comp":"unfocused","givn":"no_new","relv":"partially","comment":"hm","timestamp":"2024-01-31T12:05:00Z"})"
    "\n"
    R"({"edge_id":"e1","annotator_id":"a3","lang":"pass","comp":"unfocused","givn":"answer_leak","relv":"fully","comment":"","timestamp":"2024-01-31T12:07:00Z"})"
    "\n"
    R"({"edge_id":"e3","annotator_id":"a1","lang":"fail","comp":"skipped","givn":"skipped","relv":"skipped","comment":"","timestamp":"2024-02-01T08:00:00Z"})"
    "\n";

constexpr char kSimilarity[] =
    R"({"edge_id":"e1","reference_question":"Why did bond prices fall?","annotator_id":"a1","score":4.0})"
    "\n";

class CorpusDirTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qudeval_corpus_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    Write("documents.jsonl", kDocs);
    Write("edges.jsonl", kEdges);
    Write("labels.jsonl", kLabels);
    Write("similarity.jsonl", kSimilarity);
  }
  void TearDown() override { fs::remove_all(dir_); }

  void Write(const std::string& name, const std::string& content) {
    std::ofstream(dir_ / name, std::ios::binary) << content;
  }

  ErrorCode LoadError() {
    try {
      LoadCorpus(dir_);
    } catch (const Error& e) {
      message_ = e.what();
      return e.code();
    }
    ADD_FAILURE() << "load succeeded";
    return ErrorCode::kIo;
  }

  fs::path dir_;
  std::string message_;
};

TEST_F(CorpusDirTest, LoadsValidCorpus) {
  Corpus c = LoadCorpus(dir_);
  EXPECT_EQ(c.documents.size(), 2u);
  EXPECT_EQ(c.edges.size(), 4u);
  EXPECT_EQ(c.annotations.size(), 4u);
  EXPECT_EQ(c.machine_edge_count(), 3);
  EXPECT_EQ(c.FindEdge("e4")->system.ToString(), "custom:mine");
  EXPECT_EQ(c.DocumentOf(*c.FindEdge("e1")).Sentence(2), "Rates rose.");
  EXPECT_EQ(c.AnnotationsOf("e1").size(), 3u);
  EXPECT_FALSE(c.FindEdge("e2")->well_formed());
}

TEST_F(CorpusDirTest, RoundTripIsByteIdentical) {
  Corpus c = LoadCorpus(dir_);
  fs::path out = dir_ / "out";
  WriteCorpus(c, out);
  for (const char* name : {"documents.jsonl", "edges.jsonl", "labels.jsonl", "similarity.jsonl"}) {
    EXPECT_EQ(ReadFile(out / name), ReadFile(dir_ / name)) << name;
  }
}

TEST_F(CorpusDirTest, DanglingDocId) {
  Write("edges.jsonl",
        R"({"edge_id":"e9","doc_id":"nope","question":"Q?","anchor_idx":1,"answer_idx":2,"system":"gpt4"})"
        "\n");
  EXPECT_EQ(LoadError(), ErrorCode::kDanglingDocId);
  EXPECT_NE(message_.find("edges.jsonl:1"), std::string::npos) << message_;
}

TEST_F(CorpusDirTest, IndexOutOfRange) {
  Write("edges.jsonl",
        R"({"edge_id":"e9","doc_id":"d2","question":"Q?","anchor_idx":1,"answer_idx":3,"system":"gpt4"})"
        "\n");
  EXPECT_EQ(LoadError(), ErrorCode::kIndexOutOfRange);
  Write("edges.jsonl",
        R"({"edge_id":"e9","doc_id":"d2","question":"Q?","anchor_idx":0,"answer_idx":2,"system":"gpt4"})"
        "\n");
  EXPECT_EQ(LoadError(), ErrorCode::kIndexOutOfRange);
}

TEST_F(CorpusDirTest, DuplicateEdgeId) {
  std::string edges = kEdges;
  edges += R"({"edge_id":"e1","doc_id":"d1","question":"Again?","anchor_idx":1,"answer_idx":2,"system":"gpt4"})"
           "\n";
  Write("edges.jsonl", edges);
  EXPECT_EQ(LoadError(), ErrorCode::kDuplicateEdgeId);
  EXPECT_NE(message_.find("edges.jsonl:5"), std::string::npos) << message_;
}

TEST_F(CorpusDirTest, SchemaViolations) {
  Write("documents.jsonl",
        R"({"doc_id":"d1","sentences":[{"index":1,"text":"A."},{"index":3,"text":"B."}],"split_tag":"test"})"
        "\n");
  EXPECT_EQ(LoadError(), ErrorCode::kSchemaViolation);
  Write("documents.jsonl", "{not json\n");
  EXPECT_EQ(LoadError(), ErrorCode::kSchemaViolation);
}

TEST_F(CorpusDirTest, SkipPropagationEnforced) {
  std::string labels = kLabels;
  labels += R"({"edge_id":"e4","annotator_id":"a1","lang":"fail","comp":"direct","givn":"skipped","relv":"skipped","comment":"","timestamp":"2024-02-01T08:00:00Z"})"
            "\n";
  Write("labels.jsonl", labels);
  EXPECT_EQ(LoadError(), ErrorCode::kInvariantViolation);
}

TEST_F(CorpusDirTest, IllFormedEdgeLabelsForcedToSkipped) {
  std::string labels = kLabels;
  labels += R"({"edge_id":"e2","annotator_id":"a1","lang":"pass","comp":"direct","givn":"no_new","relv":"fully","comment":"","timestamp":"2024-02-01T08:00:00Z"})"
            "\n";
  Write("labels.jsonl", labels);
  Corpus c = LoadCorpus(dir_);
  EXPECT_EQ(c.AnnotationsOf("e2").front()->labels, CriteriaLabels::AllSkipped());
}

TEST_F(CorpusDirTest, GoldLabelsMajorityVote) {
  Corpus c = LoadCorpus(dir_);
  auto gold = GoldLabels(c);
  const auto& e1 = gold.at("e1");
  EXPECT_EQ(e1.comp, CompLabel::kUnfocused);
  EXPECT_EQ(e1.givn, GivnLabel::kNoNew);
  EXPECT_EQ(e1.relv, RelvLabel::kFully);
  EXPECT_EQ(gold.at("e3").lang, LangLabel::kFail);
  EXPECT_EQ(gold.at("e3").comp, CompLabel::kSkipped);
}

TEST_F(CorpusDirTest, SplitValidationPartitionsByArticle) {
  Corpus c = LoadCorpus(dir_);
  auto ids = HeldOutArticleIds(c);
  ASSERT_EQ(ids, std::vector<std::string>{"d2"});
  auto [validation, test] = SplitValidation(c, ids);
  EXPECT_EQ(validation.edges.size(), 2u);
  EXPECT_EQ(test.edges.size(), 2u);
  EXPECT_EQ(validation.annotations.size(), 1u);
  EXPECT_EQ(test.annotations.size() + validation.annotations.size(), c.annotations.size());
  std::vector<std::string> bad = {"zz"};
  try {
    SplitValidation(c, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownArticleId);
  }
}

TEST(ContextTest, ContextOfAnchor) {
  Document d = MakeDocument("d", {"S1.", "S2.", "S3."});
  EXPECT_EQ(ContextOf(d, 2), (std::vector<std::string>{"S1.", "S2."}));
  EXPECT_THROW(ContextOf(d, 4), Error);
  EXPECT_EQ(d.FullText(), "S1. S2. S3.");
}

TEST(SystemTest, ParseRoundTrip) {
  for (const char* name : {"ko-etal", "chatgpt", "alpaca", "gpt4", "dcqa-human", "custom:x"}) {
    auto s = System::Parse(name);
    ASSERT_TRUE(s.has_value()) << name;
    EXPECT_EQ(s->ToString(), name);
  }
  EXPECT_FALSE(System::Parse("gpt5").has_value());
  EXPECT_FALSE(System::Parse("custom:").has_value());
}

TEST(TimestampTest, RoundTrip) {
  auto t = ParseTimestamp("2024-01-31T12:00:00Z");
  ASSERT_TRUE(t.has_value());
  EXPECT_EQ(FormatTimestamp(*t), "2024-01-31T12:00:00Z");
  EXPECT_FALSE(ParseTimestamp("2024-13-31T12:00:00Z").has_value());
  EXPECT_FALSE(ParseTimestamp("yesterday").has_value());
}

TEST(LabelsTest, SkipPropagation) {
  CriteriaLabels ok;
  ok.lang = LangLabel::kPass;
  ok.comp = CompLabel::kDirect;
  EXPECT_FALSE(CheckSkipPropagation(ok, true).has_value());
  EXPECT_TRUE(CheckSkipPropagation(ok, false).has_value());
  CriteriaLabels bad;
  bad.lang = LangLabel::kFail;
  bad.relv = RelvLabel::kFully;
  EXPECT_TRUE(CheckSkipPropagation(bad, true).has_value());
}

}  // namespace
}  // namespace qudeval::corpus
