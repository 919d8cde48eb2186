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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "qudeval/assess/reports.h"
#include "qudeval/common/error.h"
#include "qudeval/common/files.h"
#include "qudeval/metrics/llm.h"

namespace qudeval::assess {
namespace {

using corpus::AnnotationRecord;
using corpus::QudEdge;
using corpus::System;
using Kind = corpus::System::Kind;

struct Builder {
  Corpus corpus;

  Builder() {
    corpus.documents.push_back(corpus::MakeDocument(
        "d1", {"Bond prices rose.", "Stocks fell.", "Traders were nervous.", "The dollar slid."}));
  }

  // `labels` is "lang comp givn relv" with "-" for skipped.
  void Edge(const std::string& id, Kind kind, const std::string& question,
            std::vector<std::pair<std::string, std::string>> annotations, int k = 1, int a = 2) {
    QudEdge e;
    e.edge_id = id;
    e.doc_id = "d1";
    e.question = question;
    e.anchor_idx = k;
    e.answer_idx = a;
    e.system = System(kind);
    corpus.edges.push_back(e);
    for (const auto& [annotator, labels] : annotations) {
      AnnotationRecord r;
      r.edge_id = id;
      r.annotator_id = annotator;
      std::istringstream in(labels);
      for (corpus::Criterion c : corpus::kAllCriteria) {
        std::string name;
        in >> name;
        EXPECT_TRUE(r.labels.Set(c, name == "-" ? "skipped" : name)) << name;
      }
      corpus.annotations.push_back(r);
    }
  }

  void Done() { corpus.Reindex(); }
};

Builder Fixture() {
  Builder b;
  b.Edge("ko1", Kind::kKoEtAl, "Why did bond prices rise?",
         {{"adjudicated", "pass direct no_new fully"}});
  b.Edge("ko2", Kind::kKoEtAl, "why did  bond prices rise?",
         {{"adjudicated", "pass unfocused answer_leak partially"}});
  b.Edge("ko3", Kind::kKoEtAl, "What fell?", {{"adjudicated", "pass not_answered no_new fully"}},
         2, 3);
  b.Edge("ko4", Kind::kKoEtAl, "Huh what?", {{"adjudicated", "fail - - -"}});
  b.Edge("g1", Kind::kGpt4, "Why were traders nervous?",
         {{"adjudicated", "pass direct no_new fully"}}, 2, 3);
  b.Edge("h1", Kind::kDcqaHuman, "What happened to bond prices?",
         {{"adjudicated", "pass direct no_new fully"}});
  b.Edge("u1", Kind::kChatGpt, "Why did the dollar slide?", {}, 3, 4);
  b.Done();
  return b;
}

TEST(DistributionTest, CountsUseDocumentedDenominators) {
  auto b = Fixture();
  auto report = BuildDistributionReport(b.corpus, corpus::GoldLabels(b.corpus));
  ASSERT_EQ(report.rows.size(), 4u);
  EXPECT_EQ(report.rows[0].system, "ko-etal");
  EXPECT_EQ(report.rows[1].system, "chatgpt");
  EXPECT_EQ(report.rows[2].system, "gpt4");
  EXPECT_EQ(report.rows[3].system, "dcqa-human");
  const auto& ko = report.rows[0];
  EXPECT_EQ(ko.questions, 4);
  EXPECT_EQ(ko.denominators.at(Criterion::kLang), 4);
  EXPECT_DOUBLE_EQ(ko.Percent(Criterion::kLang, 0), 75.0);
  EXPECT_EQ(ko.denominators.at(Criterion::kComp), 3);
  EXPECT_NEAR(ko.Percent(Criterion::kComp, 0), 100.0 / 3, 1e-12);
  EXPECT_EQ(report.rows[1].unlabeled, 1);
  EXPECT_EQ(report.rows[1].denominators.at(Criterion::kLang), 0);
}

TEST(DistributionTest, PercentagesSumToHundredOnRandomCorpora) {
  std::mt19937 rng(4);
  const char* lang[] = {"pass", "pass", "pass", "fail"};
  const char* comp[] = {"direct", "unfocused", "not_answered"};
  const char* givn[] = {"no_new", "answer_leak", "hallucination"};
  const char* relv[] = {"fully", "partially", "not_grounded"};
  for (int trial = 0; trial < 20; ++trial) {
    Builder b;
    for (int i = 0; i < 50; ++i) {
      std::string l = lang[rng() % 4];
      std::string labels = l == "fail" ? "fail - - -"
                                       : l + " " + comp[rng() % 3] + " " + givn[rng() % 3] + " " +
                                             relv[rng() % 3];
      b.Edge("e" + std::to_string(i), static_cast<Kind>(rng() % 5), "Q?",
             {{"adjudicated", labels}});
    }
    b.Done();
    auto report = BuildDistributionReport(b.corpus, corpus::GoldLabels(b.corpus));
    for (const auto& row : report.rows) {
      for (Criterion c : corpus::kAllCriteria) {
        if (row.denominators.at(c) == 0) continue;
        double sum = 0;
        for (size_t l = 0; l < row.counts.at(c).size(); ++l) sum += row.Percent(c, l);
        EXPECT_NEAR(sum, 100.0, 0.1);
      }
    }
  }
}

TEST(DistributionTest, AllSkippedReportsEmptyDenominators) {
  Builder b;
  b.Edge("bad", Kind::kAlpaca, "Why?", {{"adjudicated", "- - - -"}}, 3, 2);
  b.Done();
  auto report = BuildDistributionReport(b.corpus, corpus::GoldLabels(b.corpus));
  ASSERT_EQ(report.rows.size(), 1u);
  for (Criterion c : corpus::kAllCriteria) {
    EXPECT_EQ(report.rows[0].denominators.at(c), 0);
    EXPECT_DOUBLE_EQ(report.rows[0].Percent(c, 0), 0.0);
  }
  auto j = DistributionToJson(report, PairwiseSignificance(report));
  EXPECT_TRUE(j["rows"][0]["criteria"]["comp"]["labels"]["direct"]["percent"].is_null());
  EXPECT_NO_THROW(RenderReport(j));
}

TEST(SignificanceTest, PairsSkipEmptyRows) {
  auto b = Fixture();
  auto report = BuildDistributionReport(b.corpus, corpus::GoldLabels(b.corpus));
  auto sig = PairwiseSignificance(report);
  // chatgpt has no labels, leaving 3 rows -> 3 pairs per criterion.
  EXPECT_EQ(sig.size(), 9u);
  for (const auto& s : sig) EXPECT_NE(s.system_a, "chatgpt");
}

TEST(DuplicateReportTest, NormalizedExactMatches) {
  auto b = Fixture();
  auto rows = BuildDuplicateReport(b.corpus);
  ASSERT_EQ(rows[0].system, "ko-etal");
  EXPECT_EQ(rows[0].duplicates, 1);
  EXPECT_DOUBLE_EQ(rows[0].duplicate_pct, 25.0);
  // 5 + 5 + 2 + 2 words.
  EXPECT_DOUBLE_EQ(rows[0].avg_len, 3.5);
  for (size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i].duplicates, 0);
}

metrics::MetricVerdict Verdict(std::string edge, std::string metric, Criterion c,
                               std::string label) {
  return {std::move(edge), std::move(metric), c, std::move(label), std::nullopt, ""};
}

TEST(AssessMetricTest, FiltersAndCounts) {
  auto b = Fixture();
  auto gold = corpus::GoldLabels(b.corpus);
  std::vector<metrics::MetricVerdict> v = {
      Verdict("ko1", "m", Criterion::kComp, "direct"),
      Verdict("ko2", "m", Criterion::kComp, "direct"),
      Verdict("ko4", "m", Criterion::kComp, "direct"),  // gold lang fail: ignored
      Verdict("g1", "m", Criterion::kComp, "direct"),   // gpt4: filtered
      Verdict("ko3", "other", Criterion::kComp, "direct"),
  };
  auto a = AssessMetric(b.corpus, gold, v, "m", Criterion::kComp, {});
  EXPECT_EQ(a.eligible, 3);
  EXPECT_EQ(a.missing_verdict, 1);
  EXPECT_EQ(a.f1.matrix.total(), 2);
  EXPECT_NEAR(a.f1.per_class[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(a.f1.macro_f1, (2.0 / 3.0) / 2.0, 1e-12);

  SystemFilter with_gpt4;
  with_gpt4.exclude_gpt4 = false;
  EXPECT_EQ(AssessMetric(b.corpus, gold, v, "m", Criterion::kComp, with_gpt4).eligible, 4);

  v.push_back(Verdict("ko1", "m", Criterion::kComp, "direct"));
  EXPECT_THROW(AssessMetric(b.corpus, gold, v, "m", Criterion::kComp, {}), Error);
}

TEST(AssessMetricTest, AnswerMatchingCollapsesGold) {
  auto b = Fixture();
  auto gold = corpus::GoldLabels(b.corpus);
  const std::string id = metrics::kGptAnsId;
  std::vector<metrics::MetricVerdict> v = {
      Verdict("ko1", id, Criterion::kComp, "answered"),
      Verdict("ko2", id, Criterion::kComp, "answered"),
      Verdict("ko3", id, Criterion::kComp, "not_answered"),
  };
  auto a = AssessMetric(b.corpus, gold, v, id, Criterion::kComp, {});
  EXPECT_EQ(a.f1.matrix.labels, (std::vector<std::string>{"answered", "not_answered"}));
  EXPECT_DOUBLE_EQ(a.f1.macro_f1, 1.0);
}

TEST(BaselineReportTest, ClosedFormAndSimulation) {
  std::vector<int64_t> counts = {60, 30, 10};
  auto r = BuildBaselineReport(Criterion::kGivn, counts, 200000, 7);
  EXPECT_EQ(r.support, 100);
  EXPECT_NEAR(r.closed_form.per_class[0], 0.6, 1e-12);
  EXPECT_NEAR(r.closed_form.macro_f1, 1.0 / 3, 1e-12);
  EXPECT_NEAR(r.simulated.macro_f1, r.closed_form.macro_f1, 0.01);
  std::vector<int64_t> zero = {0, 0, 0};
  EXPECT_THROW(BuildBaselineReport(Criterion::kGivn, zero, 10, 1), Error);
}

TEST(AgreementReportTest, IgnoresAdjudicatedAndTreatsSkipAsMissing) {
  Builder b;
  b.Edge("a", Kind::kKoEtAl, "Q?",
         {{"x", "pass direct no_new fully"},
          {"y", "pass direct no_new fully"},
          {"z", "pass direct no_new fully"},
          {"adjudicated", "pass unfocused hallucination not_grounded"}});
  b.Edge("b", Kind::kKoEtAl, "Q?",
         {{"x", "pass unfocused answer_leak partially"},
          {"y", "pass unfocused answer_leak partially"},
          {"z", "fail - - -"}});
  b.Edge("c", Kind::kKoEtAl, "Q?", {{"x", "pass direct no_new fully"}});
  b.Done();
  auto r = BuildAgreementReport(b.corpus);
  EXPECT_EQ(r.edges, 2);
  EXPECT_EQ(r.annotators, (std::vector<std::string>{"x", "y", "z"}));
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_EQ(r.rows[0].level, Level::kNominal);
  EXPECT_EQ(r.rows[1].level, Level::kOrdinal);
  EXPECT_EQ(r.rows[2].level, Level::kNominal);
  EXPECT_EQ(r.rows[3].level, Level::kOrdinal);
  EXPECT_NEAR(*r.rows[0].unanimity, 0.5, 1e-12);
  for (int c = 1; c < 4; ++c) {
    EXPECT_EQ(r.rows[c].items, 2);
    EXPECT_DOUBLE_EQ(*r.rows[c].alpha, 1.0);
    EXPECT_DOUBLE_EQ(*r.rows[c].unanimity, 1.0);
    EXPECT_DOUBLE_EQ(*r.rows[c].pairwise_f1, 1.0);
  }
  EXPECT_THROW(BuildAgreementReport(Fixture().corpus), Error);
}

TEST(SimilarityTest, ItemsAverageJudgmentsAndReferencesResolve) {
  auto b = Fixture();
  b.corpus.similarities.push_back({"ko1", "What happened to bond prices?", "x", 4});
  b.corpus.similarities.push_back({"ko1", "What happened to bond prices?", "y", 2});
  b.corpus.similarities.push_back({"ko3", "Which market fell?", "x", 5});
  auto items = SimilarityItems(b.corpus);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].candidate, "Why did bond prices rise?");
  EXPECT_DOUBLE_EQ(items[0].human_score, 3.0);
  EXPECT_EQ(items[0].judgments, 2);

  auto refs = corpus::ReferenceQuestions(b.corpus);
  EXPECT_EQ(refs.at("ko1"), "What happened to bond prices?");  // dcqa-human, same answer
  EXPECT_EQ(refs.at("ko3"), "Which market fell?");             // similarity record
  EXPECT_FALSE(refs.count("h1"));
  EXPECT_FALSE(refs.count("g1"));
}

// ------------------------------------------------------------- rendering

std::filesystem::path Golden(const std::string& name) {
  return std::filesystem::path(QUDEVAL_SOURCE_DIR) / "tests" / "golden" / name;
}

void ExpectGolden(const std::string& name, const std::string& text) {
  if (std::getenv("QUDEVAL_UPDATE_GOLDENS") != nullptr) WriteFileAtomic(Golden(name), text);
  EXPECT_EQ(text, ReadFile(Golden(name))) << name;
}

TEST(RenderTest, FixtureReportsMatchGoldens) {
  auto b = Fixture();
  auto gold = corpus::GoldLabels(b.corpus);
  auto dist = BuildDistributionReport(b.corpus, gold);
  auto dist_json = DistributionToJson(dist, PairwiseSignificance(dist));
  ExpectGolden("report_distributions.txt", RenderReport(dist_json));
  // Rendering is a function of the JSON text alone.
  EXPECT_EQ(RenderReport(nlohmann::json::parse(dist_json.dump())), RenderReport(dist_json));

  ExpectGolden("report_dupstats.txt", RenderReport(DuplicatesToJson(BuildDuplicateReport(b.corpus))));

  std::vector<metrics::MetricVerdict> v = {Verdict("ko1", "m", Criterion::kComp, "direct"),
                                           Verdict("ko2", "m", Criterion::kComp, "unfocused"),
                                           Verdict("ko3", "m", Criterion::kComp, "direct")};
  std::vector<int64_t> counts = {1, 1, 1};
  auto assess = AssessmentToJson({AssessMetric(b.corpus, gold, v, "m", Criterion::kComp, {})},
                                 {BuildBaselineReport(Criterion::kComp, counts, 1000, 3)});
  ExpectGolden("report_assess.txt", RenderReport(assess));

  ExpectGolden("report_correlate.txt", RenderReport(CorrelationToJson({{"bleu1", 0.125, 40}})));
  ExpectGolden("report_calibrate.txt",
               RenderReport(CalibrationToJson(metrics::MappingFunction::CompScoreDefault(), 0.5,
                                              60, {"no gold example for label \"direct\""})));
}

TEST(RenderTest, EmptyReportsRenderHeadersOnly) {
  EXPECT_EQ(RenderReport(CorrelationToJson({})),
            "Spearman correlation with human similarity scores\nmetric  rho  n\n--------------\n");
  std::string dist = RenderReport(DistributionToJson({}, {}));
  EXPECT_NE(dist.find("lang:pass"), std::string::npos);
  EXPECT_EQ(RenderReport(DuplicatesToJson({})).find("ko-etal"), std::string::npos);
}

TEST(RenderTest, SchemaViolations) {
  auto code = [](const nlohmann::json& j) {
    try {
      RenderReport(j);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code(nlohmann::json{{"kind", "tables"}}), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code(nlohmann::json::object()), ErrorCode::kSchemaViolation);
  EXPECT_EQ(code(nlohmann::json{{"kind", "correlate"}, {"rows", {{{"metric", "x"}}}}}),
            ErrorCode::kSchemaViolation);
}

}  // namespace
}  // namespace qudeval::assess
