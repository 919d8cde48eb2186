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


#include "qudeval/cli/app.h"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "qudeval/annoserve/server.h"
#include "qudeval/assess/calibrate.h"
#include "qudeval/assess/reports.h"
#include "qudeval/cli/metric_runner.h"
#include "qudeval/common/error.h"
#include "qudeval/common/files.h"
#include "qudeval/common/hash.h"
#include "qudeval/corpus/ingest.h"
#include "qudeval/qudparse/qudparse.h"

namespace qudeval::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr uint64_t kDefaultSeed = 20231;
constexpr int64_t kDefaultDraws = 1000000;

struct Options {
  std::string corpus;
  std::vector<std::string> metrics;
  std::vector<std::string> criteria;
  std::vector<std::string> mappings;
  std::vector<std::string> verdicts;
  std::vector<std::string> systems;
  bool exclude_gpt4 = false;
  std::string split = "all";
  std::string out;
  uint64_t seed = kDefaultSeed;
  int64_t draws = kDefaultDraws;
  bool json_output = false;
  int threads = 0;
  std::string lexicons;
  std::string info_status;
  // Model access.
  std::string llm_config;
  std::string mode;
  std::string fixtures;
  std::string model;
  // parse
  std::string system;
  std::vector<std::string> docs;
  std::vector<int> answers;
  int sample = 10;
  // ingest
  std::string release;
  int index_base = 1;
  // serve
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store;
  std::string assignments;
  std::string static_dir;
  std::string cors_origin = "*";
  int compact_every = 1000;
  // render
  std::string report;
};

// Shared state of one invocation.
class Context {
 public:
  Context(std::string command, const Options& o, std::ostream& out, std::ostream& err)
      : command_(std::move(command)), o_(o), out_(out), err_(err) {}

  const Options& o() const { return o_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }
  ordered_json& config() { return config_; }

  const textkit::Lexicons& lexicons() {
    if (o_.lexicons.empty()) return textkit::Lexicons::Default();
    if (!lexicons_) {
      lexicons_ = std::make_unique<textkit::Lexicons>(
          textkit::Lexicons::FromDirectory(o_.lexicons));
    }
    return *lexicons_;
  }

  llmgate::GatewayConfig GatewayConfig() {
    llmgate::GatewayConfig c;
    if (!o_.llm_config.empty()) c = llmgate::LoadGatewayConfig(o_.llm_config);
    if (!o_.mode.empty()) {
      auto mode = llmgate::ParseMode(o_.mode);
      if (!mode) throw Error(ErrorCode::kUsage, "--mode must be live, replay or record");
      c.mode = *mode;
    }
    if (!o_.fixtures.empty()) c.fixture_dir = o_.fixtures;
    if (!o_.model.empty()) c.model = o_.model;
    if (c.mode == llmgate::Mode::kReplay && !fs::is_directory(c.fixture_dir)) {
      throw Error(ErrorCode::kUsage,
                  "replay mode needs a fixture directory (--fixtures); " +
                      c.fixture_dir.string() + " does not exist");
    }
    llm_ = c;
    return c;
  }

  corpus::Corpus LoadCorpus() {
    if (o_.corpus.empty()) throw Error(ErrorCode::kUsage, "--corpus is required");
    return corpus::LoadCorpus(o_.corpus);
  }

  // Writes `content` to <out>/<name> and records its hash.
  void Output(const std::string& name, const std::string& content) {
    fs::create_directories(o_.out);
    WriteFileAtomic(fs::path(o_.out) / name, content);
    outputs_[name] = Sha256Hex(content);
  }

  void set_network_calls(int n) { network_calls_ = n; }

  // Everything needed to reproduce the outputs; no clock, no host data.
  void WriteManifest() {
    if (o_.out.empty()) return;
    ordered_json m;
    m["command"] = command_;
    m["version"] = kVersion;
    m["config"] = config_;
    m["config_hash"] = Sha256Hex(config_.dump());
    m["lexicon_hash"] = lexicons().hash();
    if (llm_) {
      m["fixture_mode"] = std::string(llmgate::ModeName(llm_->mode));
      m["llm"] = {{"model", llm_->model},
                  {"base_url", llm_->base_url},
                  {"fixture_dir", llm_->fixture_dir.string()},
                  {"temperature", 0},
                  {"network_calls", network_calls_}};
    } else {
      m["fixture_mode"] = "none";
    }
    m["outputs"] = outputs_;
    fs::create_directories(o_.out);
    WriteFileAtomic(fs::path(o_.out) / (command_ + ".manifest.json"), m.dump(2) + "\n");
  }

  // Prints a report and saves it as <out>/<kind>.json.
  void Emit(const ordered_json& report) {
    std::string text = report.dump(2) + "\n";
    if (!o_.out.empty()) Output(report.at("kind").get<std::string>() + ".json", text);
    out_ << (o_.json_output ? text : assess::RenderReport(json::parse(report.dump())));
  }

 private:
  std::string command_;
  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  ordered_json config_ = ordered_json::object();
  std::unique_ptr<textkit::Lexicons> lexicons_;
  std::optional<llmgate::GatewayConfig> llm_;
  std::map<std::string, std::string> outputs_;
  int network_calls_ = 0;
};

Criterion ParseCriterionOrUsage(const std::string& name) {
  auto c = corpus::ParseCriterion(name);
  if (!c || *c == Criterion::kLang) {
    throw Error(ErrorCode::kUsage, "criterion must be comp, givn or relv, got \"" + name + "\"");
  }
  return *c;
}

std::vector<corpus::System> ParseSystems(const std::vector<std::string>& names) {
  std::vector<corpus::System> out;
  for (const auto& n : names) {
    auto s = corpus::ParseReleaseSystem(n);
    if (!s) throw Error(ErrorCode::kUsage, "unknown system \"" + n + "\"");
    out.push_back(*s);
  }
  return out;
}

// Explicit --systems lifts the default exclusions.
assess::SystemFilter MakeFilter(const Options& o, bool exclude_gpt4) {
  assess::SystemFilter f;
  f.only = ParseSystems(o.systems);
  f.exclude_gpt4 = exclude_gpt4;
  if (!f.only.empty()) f.exclude_human = false;
  return f;
}

corpus::Corpus SelectSplit(corpus::Corpus all, const std::string& split) {
  if (split == "all") return all;
  auto ids = corpus::HeldOutArticleIds(all);
  auto [validation, test] = corpus::SplitValidation(all, ids);
  if (split == "validation") return std::move(validation);
  if (split == "test") return std::move(test);
  throw Error(ErrorCode::kUsage, "--split must be all, validation or test");
}

ordered_json FilterJson(const assess::SystemFilter& f) {
  ordered_json j;
  j["exclude_gpt4"] = f.exclude_gpt4;
  j["exclude_human"] = f.exclude_human;
  j["only"] = ordered_json::array();
  for (const auto& s : f.only) j["only"].push_back(s.ToString());
  return j;
}

// Mapping files hold {"metric": id, "mapping": {...}}; a bare mapping is
// accepted when exactly one metric is selected.
std::map<std::pair<std::string, Criterion>, metrics::MappingFunction> LoadMappings(
    const Options& o, ordered_json& config) {
  std::map<std::pair<std::string, Criterion>, metrics::MappingFunction> out;
  config["mappings"] = ordered_json::array();
  for (const auto& path : o.mappings) {
    std::string text = ReadFile(path);
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSchemaViolation, path + ": " + e.what());
    }
    std::string metric;
    if (j.contains("metric") && j.contains("mapping")) {
      metric = j.at("metric").get<std::string>();
      j = j.at("mapping");
    } else if (o.metrics.size() == 1) {
      metric = o.metrics[0];
    } else {
      throw Error(ErrorCode::kUsage, path + ": bare mapping needs exactly one --metric");
    }
    FindMetric(metric);
    auto mapping = metrics::MappingFunction::FromJson(j);
    config["mappings"].push_back({{"metric", metric}, {"sha256", Sha256Hex(text)}});
    out.insert_or_assign({metric, mapping.criterion()}, mapping);
  }
  return out;
}

RunnerOptions MakeRunnerOptions(Context& ctx, bool needs_gateway) {
  RunnerOptions r;
  r.lexicons = &ctx.lexicons();
  if (needs_gateway) r.gateway = ctx.GatewayConfig();
  if (!ctx.o().info_status.empty()) r.info_status = ctx.o().info_status;
  r.mappings = LoadMappings(ctx.o(), ctx.config());
  r.threads = ctx.o().threads;
  return r;
}

bool AnyNeedsGateway(const std::vector<std::string>& ids) {
  return std::any_of(ids.begin(), ids.end(),
                     [](const std::string& id) { return FindMetric(id).needs_gateway; });
}

// Criteria to run a metric on: the requested ones it supports, or all of
// them (reference metrics only where a mapping exists).
std::vector<Criterion> CriteriaFor(const MetricInfo& m, const Options& o,
                                   const RunnerOptions& r) {
  std::vector<Criterion> out;
  if (!o.criteria.empty()) {
    for (const auto& name : o.criteria) {
      Criterion c = ParseCriterionOrUsage(name);
      if (std::find(m.criteria.begin(), m.criteria.end(), c) != m.criteria.end()) {
        out.push_back(c);
      }
    }
    if (out.empty()) throw Error(ErrorCode::kUsage, m.id + " judges none of the given criteria");
    return out;
  }
  for (Criterion c : m.criteria) {
    if (m.kind != MetricKind::kReference || r.mappings.count({m.id, c})) out.push_back(c);
  }
  if (out.empty()) {
    throw Error(ErrorCode::kUsage, m.id + " needs a --mapping (see the calibrate command)");
  }
  return out;
}

void WriteFailures(Context& ctx, const std::vector<EdgeFailure>& failures) {
  if (failures.empty()) return;
  std::string lines;
  for (const auto& f : failures) {
    ordered_json j;
    j["edge_id"] = f.edge_id;
    j["metric_id"] = f.metric_id;
    j["error"] = f.message;
    lines += DumpJsonLine(j);
  }
  ctx.Output("errors.jsonl", lines);
  ctx.err() << "warning: " << failures.size()
            << " model replies could not be parsed; see errors.jsonl\n";
}

// ------------------------------------------------------------- commands

int CmdIngest(Context& ctx) {
  const Options& o = ctx.o();
  ctx.config()["release"] = o.release;
  ctx.config()["index_base"] = o.index_base;
  corpus::IngestOptions options;
  options.index_base = o.index_base;
  auto corpus = corpus::IngestRelease(o.release, options);
  corpus::WriteCorpus(corpus, o.out);
  auto reloaded = corpus::LoadCorpus(o.out);
  for (const char* name : {"documents.jsonl", "edges.jsonl", "labels.jsonl", "similarity.jsonl"}) {
    fs::path p = fs::path(o.out) / name;
    if (fs::exists(p)) ctx.Output(name, ReadFile(p));
  }
  ctx.out() << "documents   " << reloaded.documents.size() << "\n"
            << "edges       " << reloaded.edges.size() << "\n"
            << "annotations " << reloaded.annotations.size() << "\n"
            << "similarity  " << reloaded.similarities.size() << "\n";
  return 0;
}

int CmdParse(Context& ctx) {
  const Options& o = ctx.o();
  auto corpus = ctx.LoadCorpus();
  auto system = corpus::ParseReleaseSystem(o.system);
  if (!system) throw Error(ErrorCode::kUsage, "unknown system \"" + o.system + "\"");
  auto& config = ctx.config();
  config["corpus"] = o.corpus;
  config["system"] = system->ToString();
  config["docs"] = o.docs;
  config["answers"] = o.answers;
  config["sample"] = o.sample;
  config["seed"] = o.seed;

  llmgate::Gateway gateway(ctx.GatewayConfig());
  qudparse::QudParser parser(gateway, *system, ctx.lexicons());
  std::vector<const corpus::Document*> docs;
  if (o.docs.empty()) {
    for (const auto& d : corpus.documents) docs.push_back(&d);
  } else {
    for (const auto& id : o.docs) {
      const auto* d = corpus.FindDocument(id);
      if (!d) throw Error(ErrorCode::kUnknownArticleId, "unknown document " + id);
      docs.push_back(d);
    }
  }
  std::mt19937_64 rng(o.seed);
  std::vector<corpus::QudEdge> all_edges;
  ordered_json runs = ordered_json::array();
  int worst = 0;
  std::vector<std::string> template_ids;
  for (const auto* doc : docs) {
    std::vector<int> indices = o.answers;
    if (indices.empty()) {
      std::vector<int> candidates;
      for (int i = 2; i <= doc->size(); ++i) candidates.push_back(i);
      std::sample(candidates.begin(), candidates.end(), std::back_inserter(indices),
                  o.sample, rng);
    }
    auto run = parser.ParseDocument(*doc, indices);
    template_ids = run.template_ids;
    ordered_json r;
    r["doc_id"] = run.doc_id;
    r["answers"] = indices;
    r["stats"] = qudparse::StatsToJson(run.stats);
    r["failures"] = ordered_json::array();
    for (const auto& f : run.failures) {
      r["failures"].push_back({{"answer_idx", f.answer_idx},
                               {"error", std::string(ErrorCodeName(f.code))},
                               {"message", f.message}});
      worst = std::max(worst, ExitCodeFor(f.code));
      ctx.err() << "warning: " << run.doc_id << " S" << f.answer_idx << ": " << f.message << "\n";
    }
    runs.push_back(std::move(r));
    all_edges.insert(all_edges.end(), run.edges.begin(), run.edges.end());
  }
  std::string edges;
  for (const auto& e : all_edges) edges += DumpJsonLine(corpus::EdgeToJson(e));
  ctx.Output("edges.jsonl", edges);
  auto stats = qudparse::ComputeStats(all_edges, ctx.lexicons());
  ordered_json run_stats = qudparse::StatsToJson(stats);
  run_stats["system"] = system->ToString();
  run_stats["model"] = gateway.config().model;
  run_stats["edges"] = all_edges.size();
  run_stats["template_ids"] = template_ids;
  run_stats["documents"] = runs;
  ctx.Output("run_stats.json", run_stats.dump(2) + "\n");
  ctx.set_network_calls(gateway.network_calls());
  ctx.out() << "edges        " << all_edges.size() << "\n"
            << "duplicates   " << stats.duplicates << "\n"
            << "avg_len      " << stats.avg_len << "\n"
            << "ill_formed   " << stats.ill_formed << "\n";
  return worst >= 2 ? 2 : 0;
}

int CmdEvaluate(Context& ctx) {
  const Options& o = ctx.o();
  if (o.metrics.empty()) throw Error(ErrorCode::kUsage, "evaluate needs at least one --metric");
  auto corpus = SelectSplit(ctx.LoadCorpus(), o.split);
  auto filter = MakeFilter(o, o.exclude_gpt4);
  auto& config = ctx.config();
  config["corpus"] = o.corpus;
  config["split"] = o.split;
  config["metrics"] = o.metrics;
  config["criteria"] = o.criteria;
  config["filter"] = FilterJson(filter);
  MetricRunner runner(corpus, MakeRunnerOptions(ctx, AnyNeedsGateway(o.metrics)));

  std::vector<corpus::QudEdge> edges;
  for (const auto& e : corpus.edges) {
    if (filter.Accepts(e.system)) edges.push_back(e);
  }
  std::string lines;
  std::ostringstream summary;
  summary << "metric criterion verdicts skipped\n";
  RunnerOptions probe;
  probe.mappings = LoadMappings(o, config);
  for (const auto& id : o.metrics) {
    const MetricInfo& m = FindMetric(id);
    for (Criterion c : CriteriaFor(m, o, probe)) {
      auto verdicts = runner.EvaluateAll(m, c, edges);
      int skipped = 0;
      for (const auto& v : verdicts) {
        metrics::ValidateVerdictLabel(v);
        skipped += v.label == corpus::kSkippedName;
        lines += DumpJsonLine(metrics::VerdictToJson(v));
      }
      summary << m.id << " " << corpus::CriterionName(c) << " " << verdicts.size() << " "
              << skipped << "\n";
    }
  }
  ctx.Output("verdicts.jsonl", lines);
  WriteFailures(ctx, runner.failures());
  ctx.set_network_calls(runner.network_calls());
  ctx.out() << summary.str();
  return 0;
}

int CmdCalibrate(Context& ctx) {
  const Options& o = ctx.o();
  if (o.metrics.size() != 1) throw Error(ErrorCode::kUsage, "calibrate needs exactly one --metric");
  const MetricInfo& m = FindMetric(o.metrics[0]);
  if (m.kind != MetricKind::kScore && m.kind != MetricKind::kReference) {
    throw Error(ErrorCode::kUsage, m.id + " produces labels, not scores");
  }
  if (o.criteria.size() > 1 || (o.criteria.empty() && m.criteria.size() != 1)) {
    throw Error(ErrorCode::kUsage, "calibrate needs exactly one --criterion for " + m.id);
  }
  Criterion c = o.criteria.empty() ? m.criteria[0] : ParseCriterionOrUsage(o.criteria[0]);
  if (std::find(m.criteria.begin(), m.criteria.end(), c) == m.criteria.end()) {
    throw Error(ErrorCode::kUsage, m.id + " does not judge " + o.criteria[0]);
  }
  auto corpus = SelectSplit(ctx.LoadCorpus(), o.split);
  auto filter = MakeFilter(o, o.exclude_gpt4);
  auto& config = ctx.config();
  config["corpus"] = o.corpus;
  config["split"] = o.split;
  config["metric"] = m.id;
  config["criterion"] = std::string(corpus::CriterionName(c));
  config["filter"] = FilterJson(filter);
  auto options = MakeRunnerOptions(ctx, m.needs_gateway);
  MetricRunner runner(corpus, options);

  auto gold = assess::EligibleGold(corpus, corpus::GoldLabels(corpus), c, filter);
  std::vector<corpus::QudEdge> edges;
  for (const auto& [id, label] : gold) edges.push_back(*corpus.FindEdge(id));
  auto scores = runner.ScoreAll(m, c, edges);
  std::vector<double> xs;
  std::vector<std::string> ys;
  int unscored = 0;
  for (size_t i = 0; i < edges.size(); ++i) {
    if (!scores[i]) {
      ++unscored;
      continue;
    }
    xs.push_back(std::clamp(*scores[i], m.lo, m.hi));
    ys.push_back(gold.at(edges[i].edge_id));
  }
  assess::CalibrationInput input;
  input.mapping_id = m.id + "-" + std::string(corpus::CriterionName(c)) + "-calibrated";
  input.criterion = c;
  for (auto l : corpus::CriterionLabels(c)) input.labels.emplace_back(l);
  input.lo = m.lo;
  input.hi = m.hi;
  auto result = assess::CalibrateMapping(xs, ys, input);
  if (unscored > 0) {
    result.warnings.push_back(std::to_string(unscored) + " edges had no score");
  }
  ordered_json file;
  file["metric"] = m.id;
  file["mapping"] = result.mapping.ToJson();
  ctx.Output("mapping-" + m.id + "-" + std::string(corpus::CriterionName(c)) + ".json",
             file.dump(2) + "\n");
  WriteFailures(ctx, runner.failures());
  ctx.set_network_calls(runner.network_calls());
  ctx.Emit(assess::CalibrationToJson(result.mapping, result.macro_f1,
                                     static_cast<int64_t>(xs.size()), result.warnings));
  return 0;
}

int CmdAssess(Context& ctx) {
  const Options& o = ctx.o();
  auto corpus = SelectSplit(ctx.LoadCorpus(), o.split);
  auto filter = MakeFilter(o, o.exclude_gpt4);
  auto& config = ctx.config();
  config["corpus"] = o.corpus;
  config["split"] = o.split;
  config["metrics"] = o.metrics;
  config["criteria"] = o.criteria;
  config["verdict_files"] = o.verdicts;
  config["filter"] = FilterJson(filter);
  config["seed"] = o.seed;
  config["draws"] = o.draws;
  auto gold = corpus::GoldLabels(corpus);

  // (metric, criterion) -> verdicts
  std::map<std::pair<std::string, Criterion>, std::vector<metrics::MetricVerdict>> groups;
  if (!o.verdicts.empty()) {
    config["verdict_hashes"] = ordered_json::array();
    for (const auto& path : o.verdicts) {
      config["verdict_hashes"].push_back(Sha256Hex(ReadFile(path)));
      ForEachJsonLine(path, [&](const json& line, int) {
        auto v = metrics::VerdictFromJson(line);
        bool wanted = o.metrics.empty() ||
                      std::find(o.metrics.begin(), o.metrics.end(), v.metric_id) != o.metrics.end();
        if (wanted && !o.criteria.empty()) {
          wanted = std::find(o.criteria.begin(), o.criteria.end(),
                             std::string(corpus::CriterionName(v.criterion))) != o.criteria.end();
        }
        if (wanted) groups[{v.metric_id, v.criterion}].push_back(std::move(v));
      });
    }
  } else {
    if (o.metrics.empty()) throw Error(ErrorCode::kUsage, "assess needs --metric or --verdicts");
    auto options = MakeRunnerOptions(ctx, AnyNeedsGateway(o.metrics));
    MetricRunner runner(corpus, options);
    for (const auto& id : o.metrics) {
      const MetricInfo& m = FindMetric(id);
      for (Criterion c : CriteriaFor(m, o, options)) {
        std::vector<corpus::QudEdge> edges;
        for (const auto& [edge_id, label] : assess::EligibleGold(corpus, gold, c, filter)) {
          edges.push_back(*corpus.FindEdge(edge_id));
        }
        groups[{m.id, c}] = runner.EvaluateAll(m, c, edges);
      }
    }
    WriteFailures(ctx, runner.failures());
    ctx.set_network_calls(runner.network_calls());
  }
  if (groups.empty()) throw Error(ErrorCode::kEmptyValidation, "no verdicts to assess");

  std::vector<assess::MetricAssessment> rows;
  std::set<Criterion> criteria;
  // Registry order first, unknown ids after.
  std::vector<std::pair<std::string, Criterion>> keys;
  for (const auto& m : KnownMetrics()) {
    for (const auto& [key, v] : groups) {
      if (key.first == m.id) keys.push_back(key);
    }
  }
  for (const auto& [key, v] : groups) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& key : keys) {
    rows.push_back(
        assess::AssessMetric(corpus, gold, groups.at(key), key.first, key.second, filter));
    criteria.insert(key.second);
  }
  std::vector<assess::BaselineReport> baselines;
  for (Criterion c : criteria) {
    auto labels = corpus::CriterionLabels(c);
    std::vector<int64_t> counts(labels.size(), 0);
    for (const auto& [id, label] : assess::EligibleGold(corpus, gold, c, filter)) {
      ++counts[*corpus::LabelRank(c, label)];
    }
    baselines.push_back(assess::BuildBaselineReport(c, counts, o.draws, o.seed));
  }
  ctx.Emit(assess::AssessmentToJson(rows, baselines));
  return 0;
}

int CmdDistributions(Context& ctx) {
  const Options& o = ctx.o();
  auto corpus = ctx.LoadCorpus();
  ctx.config()["corpus"] = o.corpus;
  ctx.config()["systems"] = o.systems;
  auto report = assess::BuildDistributionReport(corpus, corpus::GoldLabels(corpus));
  if (!o.systems.empty()) {
    std::set<std::string> keep;
    for (const auto& s : ParseSystems(o.systems)) keep.insert(s.ToString());
    std::erase_if(report.rows, [&](const auto& r) { return !keep.count(r.system); });
  }
  ctx.Emit(assess::DistributionToJson(report, assess::PairwiseSignificance(report)));
  return 0;
}

int CmdAgreement(Context& ctx) {
  ctx.config()["corpus"] = ctx.o().corpus;
  ctx.Emit(assess::AgreementToJson(assess::BuildAgreementReport(ctx.LoadCorpus())));
  return 0;
}

int CmdDupstats(Context& ctx) {
  const Options& o = ctx.o();
  auto corpus = ctx.LoadCorpus();
  ctx.config()["corpus"] = o.corpus;
  ctx.config()["systems"] = o.systems;
  auto rows = assess::BuildDuplicateReport(corpus);
  if (!o.systems.empty()) {
    std::set<std::string> keep;
    for (const auto& s : ParseSystems(o.systems)) keep.insert(s.ToString());
    std::erase_if(rows, [&](const auto& r) { return !keep.count(r.system); });
  }
  ctx.Emit(assess::DuplicatesToJson(rows));
  return 0;
}

int CmdCorrelate(Context& ctx) {
  const Options& o = ctx.o();
  std::vector<std::string> ids = o.metrics;
  if (ids.empty()) ids = {"bleu1", "rouge1", "meteor", "qsts"};
  auto corpus = ctx.LoadCorpus();
  ctx.config()["corpus"] = o.corpus;
  ctx.config()["metrics"] = ids;
  auto items = assess::SimilarityItems(corpus);
  if (items.empty()) {
    throw Error(ErrorCode::kEmptyValidation, "the corpus has no similarity judgments");
  }
  std::vector<double> human;
  for (const auto& item : items) human.push_back(item.human_score);
  RunnerOptions options;
  options.lexicons = &ctx.lexicons();
  if (AnyNeedsGateway(ids)) options.gateway = ctx.GatewayConfig();
  MetricRunner runner(corpus, options);
  std::vector<assess::CorrelationRow> rows;
  for (const auto& id : ids) {
    const MetricInfo& m = FindMetric(id);
    if (m.kind != MetricKind::kReference) {
      throw Error(ErrorCode::kUsage, id + " does not compare question pairs");
    }
    std::vector<double> scores(items.size());
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(items.size());
    std::atomic<size_t> next{0};
    int threads = std::max(1u, std::thread::hardware_concurrency());
    auto work = [&] {
      for (size_t i = next++; i < items.size(); i = next++) {
        try {
          const auto& it = items[i];
          scores[i] = runner.PairScore(m, {it.edge_id, it.candidate, it.reference},
                                       corpus.FindEdge(it.edge_id));
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    for (int t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    rows.push_back({m.id, assess::SpearmanRho(scores, human), static_cast<int64_t>(items.size())});
  }
  ctx.set_network_calls(runner.network_calls());
  ctx.Emit(assess::CorrelationToJson(rows));
  return 0;
}

int CmdRender(Context& ctx) {
  json report;
  try {
    report = json::parse(ReadFile(ctx.o().report));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, ctx.o().report + ": " + e.what());
  }
  ctx.out() << assess::RenderReport(report);
  return 0;
}

int CmdServe(Context& ctx) {
  const Options& o = ctx.o();
  if (o.store.empty() || o.assignments.empty()) {
    throw Error(ErrorCode::kUsage, "serve needs --store and --assignments");
  }
  auto corpus = ctx.LoadCorpus();
  auto assignments = annoserve::Assignments::Load(o.assignments);
  assignments.Validate(corpus);
  annoserve::ServerConfig config;
  config.store_dir = o.store;
  if (!o.static_dir.empty()) config.static_dir = o.static_dir;
  config.cors_origin = o.cors_origin;
  config.compact_every = o.compact_every;

  // Signals go to a waiter thread so Stop() never runs in a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGUSR1);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  annoserve::AnnoServer server(std::move(corpus), std::move(assignments), config);
  int port = server.Bind(o.host, o.port);
  ctx.out() << "listening on http://" << o.host << ":" << port << std::endl;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  server.Serve();
  pthread_kill(waiter.native_handle(), SIGUSR1);
  waiter.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  return 0;
}

// ----------------------------------------------------------------- setup

void AddCorpus(CLI::App* cmd, Options& o) {
  cmd->add_option("--corpus", o.corpus, "Canonical corpus directory")->required();
}

void AddFilter(CLI::App* cmd, Options& o) {
  cmd->add_option("--systems", o.systems, "Only these systems (comma separated)")
      ->delimiter(',');
  cmd->add_option("--exclude-gpt4", o.exclude_gpt4,
                  "Leave out GPT-4 questions (default true, false for evaluate)");
  cmd->add_option("--split", o.split,
                  "all, validation or test (default all, validation for calibrate)")
      ->check(CLI::IsMember({"all", "validation", "test"}));
}

void AddLlm(CLI::App* cmd, Options& o) {
  cmd->add_option("--llm-config", o.llm_config, "Gateway configuration (JSON)");
  cmd->add_option("--mode", o.mode, "live, replay or record (default replay)")
      ->check(CLI::IsMember({"live", "replay", "record"}));
  cmd->add_option("--fixtures", o.fixtures, "Fixture directory for replay and record");
  cmd->add_option("--model", o.model, "Model name");
}

void AddMetricOptions(CLI::App* cmd, Options& o) {
  std::string ids;
  for (const auto& m : KnownMetrics()) ids += (ids.empty() ? "" : ", ") + m.id;
  cmd->add_option("--metric", o.metrics, "Metric id (repeatable): " + ids);
  cmd->add_option("--criterion", o.criteria, "comp, givn or relv (repeatable)");
  cmd->add_option("--mapping", o.mappings, "Mapping file from calibrate (repeatable)");
  cmd->add_option("--info-status", o.info_status, "Information-status labels (JSON lines)");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

void AddOutput(CLI::App* cmd, Options& o, bool required) {
  auto* opt = cmd->add_option("--out", o.out, "Output directory");
  if (required) opt->required();
}

void AddReportOutput(CLI::App* cmd, Options& o) {
  AddOutput(cmd, o, false);
  cmd->add_flag("--json", o.json_output, "Print the JSON report instead of the text table");
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Evaluation toolkit for question-under-discussion discourse parsers", "qudeval"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML file with option defaults; flags override it");
  app.add_option("--lexicons", o.lexicons, "Lexicon directory (default: built in)");
  app.require_subcommand(1);

  auto* ingest =
      app.add_subcommand("ingest", "Convert a release directory to the canonical corpus");
  ingest->add_option("--release", o.release, "Release directory")->required();
  ingest->add_option("--index-base", o.index_base, "Numbering of release sentence ids")
      ->check(CLI::IsMember({0, 1}))
      ->capture_default_str();
  AddOutput(ingest, o, true);

  auto* parse = app.add_subcommand("parse", "Generate questions with the two-step prompted parser");
  AddCorpus(parse, o);
  parse->add_option("--system", o.system, "System name for the produced edges")->required();
  parse->add_option("--docs", o.docs, "Documents to parse (default all)")->delimiter(',');
  parse->add_option("--answers", o.answers, "Answer sentence indices (default: sampled)")
      ->delimiter(',');
  parse->add_option("--sample", o.sample, "Answer sentences sampled per document")
      ->capture_default_str();
  parse->add_option("--seed", o.seed, "Sampling seed")->capture_default_str();
  AddLlm(parse, o);
  AddOutput(parse, o, true);

  auto* evaluate = app.add_subcommand("evaluate", "Run metrics and write verdicts.jsonl");
  AddCorpus(evaluate, o);
  AddMetricOptions(evaluate, o);
  AddFilter(evaluate, o);
  AddLlm(evaluate, o);
  AddOutput(evaluate, o, true);

  auto* calibrate = app.add_subcommand("calibrate", "Fit a score-to-label mapping");
  AddCorpus(calibrate, o);
  AddMetricOptions(calibrate, o);
  AddFilter(calibrate, o);
  AddLlm(calibrate, o);
  AddReportOutput(calibrate, o);
  calibrate->get_option("--out")->required();

  auto* assess_cmd = app.add_subcommand("assess", "Macro-F1 of metrics against gold labels");
  AddCorpus(assess_cmd, o);
  AddMetricOptions(assess_cmd, o);
  assess_cmd->add_option("--verdicts", o.verdicts, "verdicts.jsonl files (repeatable)");
  AddFilter(assess_cmd, o);
  AddLlm(assess_cmd, o);
  assess_cmd->add_option("--seed", o.seed, "Random-baseline seed")->capture_default_str();
  assess_cmd->add_option("--draws", o.draws, "Random-baseline draws")->capture_default_str();
  AddReportOutput(assess_cmd, o);

  auto* distributions = app.add_subcommand("distributions", "Label distributions per system");
  AddCorpus(distributions, o);
  distributions->add_option("--systems", o.systems, "Only these systems")->delimiter(',');
  AddReportOutput(distributions, o);

  auto* agreement = app.add_subcommand("agreement", "Inter-annotator agreement");
  AddCorpus(agreement, o);
  AddReportOutput(agreement, o);

  auto* dupstats = app.add_subcommand("dupstats", "Duplicate questions and lengths per system");
  AddCorpus(dupstats, o);
  dupstats->add_option("--systems", o.systems, "Only these systems")->delimiter(',');
  AddReportOutput(dupstats, o);

  auto* correlate = app.add_subcommand("correlate", "Spearman correlation with human similarity");
  AddCorpus(correlate, o);
  correlate->add_option("--metric", o.metrics, "Reference metric ids (repeatable)");
  AddLlm(correlate, o);
  AddReportOutput(correlate, o);

  auto* serve = app.add_subcommand("serve", "Start the annotation server");
  AddCorpus(serve, o);
  serve->add_option("--assignments", o.assignments, "Annotator to edge queue map (JSON)");
  serve->add_option("--store", o.store, "Store directory");
  serve->add_option("--host", o.host, "Bind address")->capture_default_str();
  serve->add_option("--port", o.port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--static", o.static_dir, "Directory of UI assets");
  serve->add_option("--cors-origin", o.cors_origin, "Allowed browser origin")
      ->capture_default_str();
  serve->add_option("--compact-every", o.compact_every, "Journal entries between compactions")
      ->capture_default_str();

  auto* render = app.add_subcommand("render", "Print a saved report as text");
  render->add_option("report", o.report, "Report JSON file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return ExitCodeFor(ErrorCode::kUsage);
  }

  CLI::App* cmd = app.get_subcommands().front();
  // Options are shared, so per-command defaults are applied after parsing.
  if (cmd->get_option_no_throw("--exclude-gpt4") && cmd->count("--exclude-gpt4") == 0) {
    o.exclude_gpt4 = cmd->get_name() != "evaluate";
  }
  if (cmd->get_name() == "calibrate" && cmd->count("--split") == 0) o.split = "validation";
  Context ctx(cmd->get_name(), o, out, err);
  static const std::map<std::string, int (*)(Context&)> kCommands = {
      {"ingest", CmdIngest},       {"parse", CmdParse},
      {"evaluate", CmdEvaluate},   {"calibrate", CmdCalibrate},
      {"assess", CmdAssess},       {"distributions", CmdDistributions},
      {"agreement", CmdAgreement}, {"dupstats", CmdDupstats},
      {"correlate", CmdCorrelate}, {"serve", CmdServe},
      {"render", CmdRender}};
  try {
    int code = kCommands.at(cmd->get_name())(ctx);
    ctx.WriteManifest();
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::kUsage) err << "\n" << cmd->help();
    return ExitCodeFor(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << ErrorCodeName(ErrorCode::kIo) << ": " << e.what() << "\n";
    return ExitCodeFor(ErrorCode::kIo);
  } catch (const json::exception& e) {
    err << "error: " << ErrorCodeName(ErrorCode::kSchemaViolation) << ": " << e.what() << "\n";
    return ExitCodeFor(ErrorCode::kSchemaViolation);
  }
}

}  // namespace qudeval::cli
