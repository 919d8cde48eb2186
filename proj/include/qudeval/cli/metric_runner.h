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


// Registry of metric ids and the runner that applies them to corpus edges.

#ifndef QUDEVAL_CLI_METRIC_RUNNER_H_
#define QUDEVAL_CLI_METRIC_RUNNER_H_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qudeval/corpus/corpus.h"
#include "qudeval/llmgate/gateway.h"
#include "qudeval/metrics/mapping.h"
#include "qudeval/metrics/refbased.h"
#include "qudeval/metrics/reffree.h"
#include "qudeval/textkit/lexicons.h"

namespace qudeval::cli {

using corpus::Criterion;
using corpus::QudEdge;
using metrics::MetricVerdict;

enum class MetricKind {
  kRule,       // label straight from a rule
  kClassify,   // LLM picks an option
  kScore,      // raw score through a mapping
  kReference,  // similarity to the reference question through a mapping
};

struct MetricInfo {
  std::string id;
  MetricKind kind = MetricKind::kRule;
  std::vector<Criterion> criteria;  // criteria the metric can judge
  bool needs_gateway = false;
  bool collapsed = false;  // answered/not_answered verdicts
  double lo = 0.0;         // raw score range for kScore and kReference
  double hi = 1.0;
};

std::span<const MetricInfo> KnownMetrics();
// Throws Usage for an unknown id.
const MetricInfo& FindMetric(const std::string& id);

struct RunnerOptions {
  const textkit::Lexicons* lexicons = &textkit::Lexicons::Default();
  llmgate::GatewayConfig gateway;
  std::optional<std::filesystem::path> info_status;
  // Keyed by (metric id, criterion). Score metrics fall back to their
  // default bands; reference metrics have none.
  std::map<std::pair<std::string, Criterion>, metrics::MappingFunction> mappings;
  int threads = 0;  // 0 = hardware concurrency
};

struct EdgeFailure {
  std::string edge_id;
  std::string metric_id;
  std::string message;
};

class MetricRunner {
 public:
  MetricRunner(const corpus::Corpus& corpus, RunnerOptions options);
  ~MetricRunner();

  // Raw score of a kScore or kReference metric; nullopt when the edge is
  // ill-formed or has no reference question.
  std::optional<double> RawScore(const MetricInfo& metric, Criterion c, const QudEdge& edge);

  // Verdict of `metric` for `c` on one edge. Throws Usage when a reference
  // metric has no mapping for `c`.
  MetricVerdict Evaluate(const MetricInfo& metric, Criterion c, const QudEdge& edge);

  // Evaluate over `edges` on a worker pool, in input order. Parse failures
  // of model replies are collected in failures() and leave no verdict;
  // every other error aborts the run.
  std::vector<MetricVerdict> EvaluateAll(const MetricInfo& metric, Criterion c,
                                         std::span<const QudEdge> edges);
  // Same for raw scores; edges without a score are nullopt.
  std::vector<std::optional<double>> ScoreAll(const MetricInfo& metric, Criterion c,
                                              std::span<const QudEdge> edges);

  // Similarity score of a candidate/reference pair for a reference metric.
  double PairScore(const MetricInfo& metric, const metrics::QuestionPair& pair,
                   const QudEdge* edge);

  const std::vector<EdgeFailure>& failures() const { return failures_; }
  // Transport attempts of the gateway, 0 if none was created.
  int network_calls() const;
  const textkit::Lexicons& lexicons() const { return *options_.lexicons; }

 private:
  llmgate::Gateway& gateway();
  metrics::InfoStatusProvider& info_status();
  template <typename T, typename Fn>
  std::vector<T> ForEach(std::span<const QudEdge> edges, const MetricInfo& metric, Fn fn);

  const corpus::Corpus& corpus_;
  RunnerOptions options_;
  std::map<std::string, std::string> references_;
  std::mutex mu_;
  std::unique_ptr<llmgate::Gateway> gateway_;
  std::unique_ptr<metrics::FileInfoStatusProvider> info_status_;
  metrics::HashedNgramEmbedding embedding_;
  std::vector<EdgeFailure> failures_;
};

}  // namespace qudeval::cli

#endif  // QUDEVAL_CLI_METRIC_RUNNER_H_
