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


#include "qudeval/assess/calibrate.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "qudeval/assess/stats.h"
#include "qudeval/common/error.h"

namespace qudeval::assess {

namespace {

constexpr double kTieEpsilon = 1e-12;

// True when `a` should replace the incumbent `b` at equal macro-F1.
bool PreferOnTie(const std::vector<double>& a, const std::vector<double>& b) {
  double span_a = a.front() - a.back();
  double span_b = b.front() - b.back();
  if (span_a != span_b) return span_a > span_b;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

std::vector<double> DefaultGrid(double lo, double hi) {
  double step = (hi - lo) > 1.5 ? 1.0 : 0.01;
  std::vector<double> grid;
  int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) {
    grid.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  }
  return grid;
}

CalibrationResult CalibrateMapping(std::span<const double> scores,
                                   std::span<const std::string> gold,
                                   const CalibrationInput& input) {
  if (scores.empty()) {
    throw Error(ErrorCode::kEmptyValidation, "no validation scores to calibrate on");
  }
  if (scores.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores and gold labels differ in length");
  }
  const size_t k = input.labels.size();
  if (k < 2) {
    throw Error(ErrorCode::kInvariantViolation, "a mapping needs at least two labels");
  }

  std::vector<int> gold_idx;
  std::vector<int64_t> totals(k, 0);
  for (size_t i = 0; i < gold.size(); ++i) {
    auto it = std::find(input.labels.begin(), input.labels.end(), gold[i]);
    if (it == input.labels.end()) {
      throw Error(ErrorCode::kLabelOutsideOrder, "gold label \"" + gold[i] + "\" not in order");
    }
    if (scores[i] < input.lo || scores[i] > input.hi || std::isnan(scores[i])) {
      throw Error(ErrorCode::kOutOfRange, "score " + std::to_string(scores[i]) + " outside [" +
                                              std::to_string(input.lo) + ", " +
                                              std::to_string(input.hi) + "]");
    }
    gold_idx.push_back(static_cast<int>(it - input.labels.begin()));
    ++totals[gold_idx.back()];
  }

  CalibrationResult result;
  for (size_t c = 0; c < k; ++c) {
    if (totals[c] == 0) {
      result.warnings.push_back("no gold example for label \"" + input.labels[c] + "\"");
    }
  }

  std::vector<double> grid = input.grid.empty() ? DefaultGrid(input.lo, input.hi) : input.grid;
  std::erase_if(grid, [&](double t) { return t < input.lo || t > input.hi; });
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < k - 1) {
    throw Error(ErrorCode::kInvariantViolation, "grid has fewer points than thresholds needed");
  }

  // at_least[g][c]: gold-c items scoring >= grid[g].
  std::vector<std::vector<int64_t>> at_least(grid.size(), std::vector<int64_t>(k, 0));
  for (size_t g = 0; g < grid.size(); ++g) {
    for (size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= grid[g]) ++at_least[g][gold_idx[i]];
    }
  }

  double best = -1.0;
  std::vector<double> best_tuple;
  std::vector<size_t> chosen;  // grid indices, strictly decreasing
  std::function<void(size_t)> search = [&](size_t limit) {
    if (chosen.size() == k - 1) {
      ConfusionMatrix m(input.labels);
      for (size_t c = 0; c < k; ++c) {
        int64_t above = 0;
        for (size_t band = 0; band < k; ++band) {
          int64_t cum = band + 1 < k ? at_least[chosen[band]][c] : totals[c];
          m.counts[c][band] = cum - above;
          above = cum;
        }
      }
      double f1 = F1FromMatrix(std::move(m)).macro_f1;
      ++result.evaluated_tuples;
      std::vector<double> tuple;
      for (size_t g : chosen) tuple.push_back(grid[g]);
      if (f1 > best + kTieEpsilon ||
          (std::abs(f1 - best) <= kTieEpsilon && PreferOnTie(tuple, best_tuple))) {
        best = f1;
        best_tuple = std::move(tuple);
      }
      return;
    }
    size_t remaining = k - 1 - chosen.size();
    for (size_t g = remaining - 1; g < limit; ++g) {
      chosen.push_back(g);
      search(g);
      chosen.pop_back();
    }
  };
  search(grid.size());

  result.macro_f1 = best;
  result.mapping = metrics::MappingFunction(input.mapping_id, input.criterion, input.labels,
                                            best_tuple, std::vector<bool>(k - 1, true),
                                            input.lo, input.hi);
  return result;
}

}  // namespace qudeval::assess
