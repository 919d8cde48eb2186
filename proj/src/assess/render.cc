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


#include <cstdio>
#include <string>
#include <vector>

#include "qudeval/assess/reports.h"
#include "qudeval/common/error.h"

namespace qudeval::assess {

namespace {

using nlohmann::json;

std::string Fixed(const json& v, int digits) {
  if (v.is_null()) return "-";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v.get<double>());
  return buf;
}

std::string Int(const json& v) { return std::to_string(v.get<int64_t>()); }

// First column left-aligned, the rest right-aligned, two spaces apart.
std::string Table(const std::string& title, const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width(header.size(), 0);
  for (size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (size_t c = 0; c < header.size(); ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string();
      std::string pad(width[c] - cell.size(), ' ');
      if (c > 0) out += "  ";
      out += c == 0 ? cell + pad : pad + cell;
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = title + "\n" + line(header);
  size_t total = 0;
  for (size_t w : width) total += w;
  out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
  for (const auto& row : rows) out += line(row);
  return out;
}

std::string RenderDistributions(const json& j) {
  std::vector<std::string> header = {"system", "N"};
  for (Criterion c : corpus::kAllCriteria) {
    for (auto label : corpus::CriterionLabels(c)) {
      header.push_back(std::string(corpus::CriterionName(c)) + ":" + std::string(label));
    }
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : j.at("rows")) {
    std::vector<std::string> row = {r.at("system").get<std::string>(), Int(r.at("questions"))};
    for (Criterion c : corpus::kAllCriteria) {
      const json& crit = r.at("criteria").at(std::string(corpus::CriterionName(c)));
      for (auto label : corpus::CriterionLabels(c)) {
        row.push_back(Fixed(crit.at("labels").at(std::string(label)).at("percent"), 1));
      }
    }
    rows.push_back(std::move(row));
  }
  std::string out = Table(
      "Label distribution (%; Lang over labeled questions, others over Lang-pass questions)",
      header, rows);
  std::vector<std::vector<std::string>> sig;
  for (const auto& s : j.at("significance")) {
    sig.push_back({s.at("criterion").get<std::string>(), s.at("system_a").get<std::string>(),
                   s.at("system_b").get<std::string>(), Fixed(s.at("statistic"), 2),
                   Int(s.at("df")), s.at("p").get<std::string>()});
  }
  out += "\n" + Table("Chi-square independence between systems",
                      {"criterion", "system_a", "system_b", "chi2", "df", "p"}, sig);
  return out;
}

std::string RenderDuplicates(const json& j) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : j.at("rows")) {
    rows.push_back({r.at("system").get<std::string>(), Int(r.at("questions")),
                    Int(r.at("duplicates").at("count")),
                    Fixed(r.at("duplicates").at("percent"), 1),
                    Fixed(r.at("avg_len").at("value"), 2)});
  }
  return Table("Duplicate questions and average length",
               {"system", "N", "duplicates", "dup%", "avg_len"}, rows);
}

std::string JoinF1(const json& values, int digits) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += "/";
    out += Fixed(v, digits);
  }
  return out;
}

std::string RenderAssessment(const json& j) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : j.at("rows")) {
    std::string labels, f1;
    for (const auto& pc : r.at("per_class")) {
      if (!labels.empty()) {
        labels += "/";
        f1 += "/";
      }
      labels += pc.at("label").get<std::string>();
      f1 += Fixed(pc.at("f1"), 2);
    }
    rows.push_back({r.at("metric").get<std::string>(), r.at("criterion").get<std::string>(),
                    labels, f1, Fixed(r.at("macro_f1").at("value"), 2),
                    Int(r.at("macro_f1").at("denominator")), Int(r.at("missing_verdict")),
                    Fixed(r.at("random").at("macro_f1"), 2)});
  }
  std::string out = Table("Metric assessment against gold labels (F1)",
                          {"metric", "criterion", "labels", "per-class", "macro", "n",
                           "missing", "random"},
                          rows);
  std::vector<std::vector<std::string>> base;
  for (const auto& b : j.at("baselines")) {
    base.push_back({b.at("criterion").get<std::string>(), JoinF1(b.at("distribution"), 3),
                    JoinF1(b.at("closed_form").at("per_class"), 3),
                    Fixed(b.at("closed_form").at("macro_f1"), 3),
                    Fixed(b.at("simulated").at("macro_f1"), 3), Int(b.at("draws")),
                    std::to_string(b.at("seed").get<uint64_t>()), Int(b.at("support"))});
  }
  out += "\n" + Table("Random baseline (labels sampled from the gold distribution)",
                      {"criterion", "distribution", "expected F1", "macro", "simulated",
                       "draws", "seed", "n"},
                      base);
  return out;
}

std::string RenderAgreement(const json& j) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : j.at("rows")) {
    rows.push_back({r.at("criterion").get<std::string>(), r.at("level").get<std::string>(),
                    Fixed(r.at("alpha"), 3), Fixed(r.at("unanimity"), 3),
                    Fixed(r.at("pairwise_f1"), 3), Int(r.at("items"))});
  }
  return Table("Inter-annotator agreement over " + Int(j.at("edges")) + " edges",
               {"criterion", "level", "alpha", "unanimity", "pairwise_f1", "items"}, rows);
}

std::string RenderCorrelation(const json& j) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : j.at("rows")) {
    rows.push_back({r.at("metric").get<std::string>(), Fixed(r.at("rho"), 3), Int(r.at("n"))});
  }
  return Table("Spearman correlation with human similarity scores", {"metric", "rho", "n"},
               rows);
}

std::string RenderCalibration(const json& j) {
  const json& m = j.at("mapping");
  std::vector<std::vector<std::string>> rows;
  const json& labels = m.at("labels");
  const json& thresholds = m.at("thresholds");
  for (size_t i = 0; i < thresholds.size(); ++i) {
    rows.push_back({labels.at(i).get<std::string>(), Fixed(thresholds.at(i), 2),
                    m.at("inclusive").at(i).get<bool>() ? ">=" : ">"});
  }
  std::string out = Table("Calibrated mapping " + m.at("id").get<std::string>() + " (" +
                              m.at("criterion").get<std::string>() + "), macro-F1 " +
                              Fixed(j.at("macro_f1").at("value"), 3) + " over " +
                              Int(j.at("macro_f1").at("denominator")) + " edges",
                          {"label", "threshold", "test"}, rows);
  for (const auto& w : j.at("warnings")) out += "warning: " + w.get<std::string>() + "\n";
  return out;
}

}  // namespace

std::string RenderReport(const nlohmann::json& report) {
  try {
    const std::string kind = report.at("kind").get<std::string>();
    if (kind == "distributions") return RenderDistributions(report);
    if (kind == "dupstats") return RenderDuplicates(report);
    if (kind == "assess") return RenderAssessment(report);
    if (kind == "agreement") return RenderAgreement(report);
    if (kind == "correlate") return RenderCorrelation(report);
    if (kind == "calibrate") return RenderCalibration(report);
    throw Error(ErrorCode::kSchemaViolation, "unknown report kind \"" + kind + "\"");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("malformed report: ") + e.what());
  }
}

}  // namespace qudeval::assess
