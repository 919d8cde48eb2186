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


#include "qudeval/cli/metric_runner.h"

#include <atomic>
#include <exception>
#include <thread>

#include "qudeval/common/error.h"
#include "qudeval/metrics/llm.h"

namespace qudeval::cli {

namespace {

using C = Criterion;

const std::vector<MetricInfo>& Registry() {
  static const std::vector<MetricInfo> kMetrics = [] {
    const std::vector<C> all = {C::kComp, C::kGivn, C::kRelv};
    std::vector<MetricInfo> m = {
        {metrics::kGivennessRuleId, MetricKind::kRule, {C::kGivn}},
        {metrics::kRelevanceRuleId, MetricKind::kRule, {C::kRelv}},
        {metrics::kInfoStatusId, MetricKind::kRule, {C::kGivn}},
        {metrics::kBleu1SimId, MetricKind::kScore, {C::kRelv}, false, false, 0.0, 1.0},
        {"gpt-cls-zs-givn", MetricKind::kClassify, {C::kGivn}, true},
        {"gpt-cls-fs-givn", MetricKind::kClassify, {C::kGivn}, true},
        {"gpt-cls-zs-relv", MetricKind::kClassify, {C::kRelv}, true},
        {"gpt-cls-fs-relv", MetricKind::kClassify, {C::kRelv}, true},
        {"gpt-scr-comp", MetricKind::kScore, {C::kComp}, true, false, 1.0, 100.0},
        {"gpt-scr-relv", MetricKind::kScore, {C::kRelv}, true, false, 1.0, 100.0},
        {metrics::kGptAnsId, MetricKind::kClassify, {C::kComp}, true, true},
        {"bleu1", MetricKind::kReference, all, false, false, 0.0, 1.0},
        {"rouge1", MetricKind::kReference, all, false, false, 0.0, 1.0},
        {"meteor", MetricKind::kReference, all, false, false, 0.0, 1.0},
        {"embed-f1", MetricKind::kReference, all, false, false, 0.0, 1.0},
        {"qsts", MetricKind::kReference, all, false, false, 0.0, 1.0},
        {metrics::kLlmSimilarityId, MetricKind::kReference, all, true, false, 1.0, 5.0},
    };
    return m;
  }();
  return kMetrics;
}

bool IsReplyFailure(ErrorCode code) {
  return code == ErrorCode::kUnparseableResponse || code == ErrorCode::kNonNumericResponse ||
         code == ErrorCode::kEmptyCompletion || code == ErrorCode::kNoSentenceMatch;
}

std::string JoinContext(const corpus::Document& doc, int k) {
  std::string out;
  for (const auto& s : corpus::ContextOf(doc, k)) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

}  // namespace

std::span<const MetricInfo> KnownMetrics() { return Registry(); }

const MetricInfo& FindMetric(const std::string& id) {
  for (const auto& m : Registry()) {
    if (m.id == id) return m;
  }
  std::string known;
  for (const auto& m : Registry()) known += (known.empty() ? "" : ", ") + m.id;
  throw Error(ErrorCode::kUsage, "unknown metric \"" + id + "\" (known: " + known + ")");
}

MetricRunner::MetricRunner(const corpus::Corpus& corpus, RunnerOptions options)
    : corpus_(corpus),
      options_(std::move(options)),
      references_(corpus::ReferenceQuestions(corpus)) {}

MetricRunner::~MetricRunner() = default;

llmgate::Gateway& MetricRunner::gateway() {
  std::lock_guard lock(mu_);
  if (!gateway_) gateway_ = std::make_unique<llmgate::Gateway>(options_.gateway);
  return *gateway_;
}

metrics::InfoStatusProvider& MetricRunner::info_status() {
  std::lock_guard lock(mu_);
  if (!info_status_) {
    if (!options_.info_status) {
      throw Error(ErrorCode::kUsage, "info-status needs --info-status <labels.jsonl>");
    }
    info_status_ = std::make_unique<metrics::FileInfoStatusProvider>(*options_.info_status);
  }
  return *info_status_;
}

int MetricRunner::network_calls() const { return gateway_ ? gateway_->network_calls() : 0; }

double MetricRunner::PairScore(const MetricInfo& metric, const metrics::QuestionPair& pair,
                               const QudEdge* edge) {
  const auto& lex = *options_.lexicons;
  if (metric.id == "bleu1") return metrics::Bleu1(pair.candidate, pair.reference, lex);
  if (metric.id == "rouge1") return metrics::Rouge1F1(pair.candidate, pair.reference, lex);
  if (metric.id == "meteor") return metrics::MeteorLite(pair.candidate, pair.reference, lex);
  if (metric.id == "embed-f1") {
    return metrics::EmbedF1(pair.candidate, pair.reference, embedding_, lex);
  }
  if (metric.id == "qsts") return metrics::QstsArith(pair.candidate, pair.reference, nullptr, lex);
  if (metric.id == metrics::kLlmSimilarityId) {
    std::string context;
    if (edge) context = JoinContext(corpus_.DocumentOf(*edge), edge->anchor_idx);
    return metrics::LlmSimilarity(pair, context, gateway());
  }
  throw Error(ErrorCode::kUsage, metric.id + " is not a reference metric");
}

std::optional<double> MetricRunner::RawScore(const MetricInfo& metric, Criterion c,
                                             const QudEdge& edge) {
  if (!edge.well_formed()) return std::nullopt;
  const auto& doc = corpus_.DocumentOf(edge);
  if (metric.kind == MetricKind::kReference) {
    auto it = references_.find(edge.edge_id);
    if (it == references_.end()) return std::nullopt;
    return PairScore(metric, {edge.edge_id, edge.question, it->second}, &edge);
  }
  if (metric.id == metrics::kBleu1SimId) {
    return metrics::Bleu1(edge.question, doc.Sentence(edge.anchor_idx), *options_.lexicons);
  }
  if (metric.kind == MetricKind::kScore) {
    auto mapping = c == C::kComp ? metrics::MappingFunction::CompScoreDefault()
                                 : metrics::MappingFunction::RelvScoreDefault();
    return metrics::LlmScore(edge, doc, c, mapping, gateway()).raw_score;
  }
  throw Error(ErrorCode::kUsage, metric.id + " has no raw score");
}

MetricVerdict MetricRunner::Evaluate(const MetricInfo& metric, Criterion c, const QudEdge& edge) {
  if (std::find(metric.criteria.begin(), metric.criteria.end(), c) == metric.criteria.end()) {
    throw Error(ErrorCode::kUsage, metric.id + " does not judge " +
                                       std::string(corpus::CriterionName(c)));
  }
  const auto& lex = *options_.lexicons;
  if (!edge.well_formed()) return metrics::SkippedVerdict(edge, metric.id, c);
  const auto& doc = corpus_.DocumentOf(edge);
  const metrics::MappingFunction* mapping = nullptr;
  if (auto it = options_.mappings.find({metric.id, c}); it != options_.mappings.end()) {
    mapping = &it->second;
  }
  if (metric.id == metrics::kGivennessRuleId) return metrics::GivennessRule(edge, doc, lex);
  if (metric.id == metrics::kRelevanceRuleId) return metrics::RelevanceRule(edge, doc, lex);
  if (metric.id == metrics::kInfoStatusId) {
    return metrics::InfoStatusGivenness(edge, doc, info_status(), lex);
  }
  if (metric.id == metrics::kBleu1SimId) {
    return metrics::Bleu1SimRelevance(
        edge, doc, mapping ? *mapping : metrics::MappingFunction::Bleu1SimDefault(), lex);
  }
  if (metric.id == metrics::kGptAnsId) {
    return metrics::GptAnsCompatibility(edge, doc, gateway(), lex);
  }
  if (metric.kind == MetricKind::kClassify) {
    bool few = metric.id.find("-fs-") != std::string::npos;
    return metrics::LlmClassify(edge, doc, c, few ? metrics::Shots::kFew : metrics::Shots::kZero,
                                gateway());
  }
  if (metric.kind == MetricKind::kScore) {
    auto fallback = c == C::kComp ? metrics::MappingFunction::CompScoreDefault()
                                  : metrics::MappingFunction::RelvScoreDefault();
    return metrics::LlmScore(edge, doc, c, mapping ? *mapping : fallback, gateway());
  }
  if (!mapping) {
    throw Error(ErrorCode::kUsage, metric.id + " needs a --mapping for " +
                                       std::string(corpus::CriterionName(c)) +
                                       " (see the calibrate command)");
  }
  MetricVerdict v;
  v.edge_id = edge.edge_id;
  v.metric_id = metric.id;
  v.criterion = c;
  auto score = RawScore(metric, c, edge);
  if (!score) {
    v.label = std::string(corpus::kSkippedName);
    v.provenance = "no-reference";
    return v;
  }
  v.raw_score = *score;
  v.label = mapping->Map(std::clamp(*score, mapping->lo(), mapping->hi()));
  v.provenance = "lexicon:" + lex.hash() + ";mapping:" + mapping->id();
  return v;
}

template <typename T, typename Fn>
std::vector<T> MetricRunner::ForEach(std::span<const QudEdge> edges, const MetricInfo& metric,
                                     Fn fn) {
  std::vector<std::optional<T>> results(edges.size());
  std::vector<std::exception_ptr> errors(edges.size());
  std::vector<std::string> reply_failures(edges.size());
  std::atomic<size_t> next{0};
  int threads = options_.threads > 0 ? options_.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  if (metric.needs_gateway) threads = std::max(threads, options_.gateway.max_in_flight);
  threads = std::clamp<int>(threads, 1, std::max<size_t>(edges.size(), 1));
  auto work = [&] {
    for (size_t i = next++; i < edges.size(); i = next++) {
      try {
        results[i] = fn(edges[i]);
      } catch (const Error& e) {
        if (IsReplyFailure(e.code())) {
          reply_failures[i] = e.what();
        } else {
          errors[i] = std::current_exception();
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  for (size_t i = 0; i < edges.size(); ++i) {
    if (!reply_failures[i].empty()) {
      failures_.push_back({edges[i].edge_id, metric.id, reply_failures[i]});
    } else {
      out.push_back(std::move(*results[i]));
    }
  }
  return out;
}

std::vector<MetricVerdict> MetricRunner::EvaluateAll(const MetricInfo& metric, Criterion c,
                                                     std::span<const QudEdge> edges) {
  return ForEach<MetricVerdict>(edges, metric,
                                [&](const QudEdge& e) { return Evaluate(metric, c, e); });
}

std::vector<std::optional<double>> MetricRunner::ScoreAll(const MetricInfo& metric, Criterion c,
                                                          std::span<const QudEdge> edges) {
  // Reply failures leave a gap; keep alignment by scoring into pairs.
  auto scored = ForEach<std::pair<std::string, std::optional<double>>>(
      edges, metric, [&](const QudEdge& e) {
        return std::pair<std::string, std::optional<double>>(e.edge_id, RawScore(metric, c, e));
      });
  std::map<std::string, std::optional<double>> by_edge(scored.begin(), scored.end());
  std::vector<std::optional<double>> out;
  for (const auto& e : edges) {
    auto it = by_edge.find(e.edge_id);
    out.push_back(it == by_edge.end() ? std::nullopt : it->second);
  }
  return out;
}

}  // namespace qudeval::cli
