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


#include "qudeval/assess/stats.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qudeval/common/error.h"

namespace qudeval::assess {

namespace {

int IndexOf(std::span<const std::string> order, const std::string& label) {
  auto it = std::find(order.begin(), order.end(), label);
  if (it == order.end()) {
    throw Error(ErrorCode::kLabelOutsideOrder, "label \"" + label + "\" is not in the label order");
  }
  return static_cast<int>(it - order.begin());
}

void CheckDistribution(std::span<const double> distribution) {
  if (distribution.empty()) {
    throw Error(ErrorCode::kInvariantViolation, "empty label distribution");
  }
  double sum = 0.0;
  for (double g : distribution) {
    if (g < 0.0 || !std::isfinite(g)) {
      throw Error(ErrorCode::kInvariantViolation, "negative or non-finite label proportion");
    }
    sum += g;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::kInvariantViolation,
                "label distribution sums to " + std::to_string(sum) + ", not 1");
  }
}

// Validates shape and values; returns the number of items.
size_t CheckMatrix(const ReliabilityMatrix& matrix, int num_values) {
  if (matrix.size() < 2) {
    throw Error(ErrorCode::kInsufficientAnnotators, "agreement needs at least two annotators");
  }
  size_t items = matrix.front().size();
  for (const auto& row : matrix) {
    if (row.size() != items) {
      throw Error(ErrorCode::kLengthMismatch, "annotator rows cover different item counts");
    }
    for (const auto& v : row) {
      if (v && (*v < 0 || *v >= num_values)) {
        throw Error(ErrorCode::kOutOfRange, "label value " + std::to_string(*v) + " outside 0.." +
                                                std::to_string(num_values - 1));
      }
    }
  }
  return items;
}

std::vector<int> ItemValues(const ReliabilityMatrix& matrix, size_t item) {
  std::vector<int> values;
  for (const auto& row : matrix) {
    if (row[item]) values.push_back(*row[item]);
  }
  return values;
}

struct CriticalRow {
  double p05, p01, p001;
};

constexpr CriticalRow kCritical[] = {
    {3.841, 6.635, 10.828},  {5.991, 9.210, 13.816},  {7.815, 11.345, 16.266},
    {9.488, 13.277, 18.467}, {11.070, 15.086, 20.515}, {12.592, 16.812, 22.458},
    {14.067, 18.475, 24.322}, {15.507, 20.090, 26.124}, {16.919, 21.666, 27.877},
    {18.307, 23.209, 29.588},
};

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> order)
    : labels(std::move(order)),
      counts(labels.size(), std::vector<int64_t>(labels.size(), 0)) {}

int64_t ConfusionMatrix::total() const {
  int64_t t = 0;
  for (const auto& row : counts) t = std::accumulate(row.begin(), row.end(), t);
  return t;
}

int64_t ConfusionMatrix::fp(size_t c) const {
  int64_t n = 0;
  for (size_t g = 0; g < counts.size(); ++g) {
    if (g != c) n += counts[g][c];
  }
  return n;
}

int64_t ConfusionMatrix::fn(size_t c) const {
  int64_t n = 0;
  for (size_t p = 0; p < counts.size(); ++p) {
    if (p != c) n += counts[c][p];
  }
  return n;
}

F1Report F1FromMatrix(ConfusionMatrix matrix) {
  F1Report r{std::move(matrix), {}, {}, 0.0};
  size_t k = r.matrix.labels.size();
  int counted = 0;
  double sum = 0.0;
  for (size_t c = 0; c < k; ++c) {
    int64_t denom = 2 * r.matrix.tp(c) + r.matrix.fp(c) + r.matrix.fn(c);
    double f1 = denom == 0 ? 0.0 : 2.0 * static_cast<double>(r.matrix.tp(c)) / denom;
    r.per_class.push_back(f1);
    r.counted.push_back(denom != 0);
    if (denom != 0) {
      sum += f1;
      ++counted;
    }
  }
  r.macro_f1 = counted == 0 ? 0.0 : sum / counted;
  return r;
}

F1Report ComputeF1(std::span<const std::string> predicted, std::span<const std::string> gold,
                   std::span<const std::string> order) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(predicted.size()) +
                                                " predictions for " + std::to_string(gold.size()) +
                                                " gold labels");
  }
  ConfusionMatrix m({order.begin(), order.end()});
  for (size_t i = 0; i < gold.size(); ++i) {
    ++m.counts[IndexOf(order, gold[i])][IndexOf(order, predicted[i])];
  }
  return F1FromMatrix(std::move(m));
}

BaselineResult RandomBaseline(std::span<const double> distribution) {
  CheckDistribution(distribution);
  BaselineResult r;
  int counted = 0;
  double sum = 0.0;
  for (double g : distribution) {
    r.per_class.push_back(g);
    if (g > 0.0) {
      sum += g;
      ++counted;
    }
  }
  r.macro_f1 = sum / counted;
  return r;
}

BaselineResult SimulateRandomBaseline(std::span<const double> distribution, int64_t draws,
                                      uint64_t seed) {
  CheckDistribution(distribution);
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> sample(distribution.begin(), distribution.end());
  std::vector<std::string> order;
  for (size_t c = 0; c < distribution.size(); ++c) order.push_back(std::to_string(c));
  ConfusionMatrix m(order);
  for (int64_t i = 0; i < draws; ++i) {
    int gold = sample(rng);
    int predicted = sample(rng);
    ++m.counts[gold][predicted];
  }
  F1Report f = F1FromMatrix(std::move(m));
  return {f.per_class, f.macro_f1};
}

const char* LevelName(Level level) { return level == Level::kNominal ? "nominal" : "ordinal"; }

double KrippendorffAlpha(const ReliabilityMatrix& matrix, int num_values, Level level) {
  size_t items = CheckMatrix(matrix, num_values);
  std::vector<std::vector<double>> o(num_values, std::vector<double>(num_values, 0.0));
  for (size_t u = 0; u < items; ++u) {
    auto values = ItemValues(matrix, u);
    if (values.size() < 2) continue;
    double w = 1.0 / static_cast<double>(values.size() - 1);
    for (size_t i = 0; i < values.size(); ++i) {
      for (size_t j = 0; j < values.size(); ++j) {
        if (i != j) o[values[i]][values[j]] += w;
      }
    }
  }
  std::vector<double> n_c(num_values, 0.0);
  for (int c = 0; c < num_values; ++c) n_c[c] = std::accumulate(o[c].begin(), o[c].end(), 0.0);
  double n = std::accumulate(n_c.begin(), n_c.end(), 0.0);
  if (n == 0.0) {
    throw Error(ErrorCode::kDegenerateData, "no item carries two or more values");
  }
  auto delta = [&](int c, int k) {
    if (c == k) return 0.0;
    if (level == Level::kNominal) return 1.0;
    int lo = std::min(c, k), hi = std::max(c, k);
    double s = 0.0;
    for (int g = lo; g <= hi; ++g) s += n_c[g];
    s -= (n_c[c] + n_c[k]) / 2.0;
    return s * s;
  };
  double observed = 0.0, expected = 0.0;
  for (int c = 0; c < num_values; ++c) {
    for (int k = 0; k < num_values; ++k) {
      double d = delta(c, k);
      observed += o[c][k] * d;
      expected += n_c[c] * n_c[k] * d;
    }
  }
  expected /= (n - 1.0);
  if (expected == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

double PairwiseF1(const ReliabilityMatrix& matrix, int num_values) {
  size_t items = CheckMatrix(matrix, num_values);
  std::vector<std::string> order;
  for (int c = 0; c < num_values; ++c) order.push_back(std::to_string(c));
  double sum = 0.0;
  int pairs = 0;
  for (size_t a = 0; a < matrix.size(); ++a) {
    for (size_t b = 0; b < matrix.size(); ++b) {
      if (a == b) continue;
      ConfusionMatrix m(order);
      for (size_t u = 0; u < items; ++u) {
        if (matrix[a][u] && matrix[b][u]) ++m.counts[*matrix[a][u]][*matrix[b][u]];
      }
      if (m.total() == 0) continue;
      sum += F1FromMatrix(std::move(m)).macro_f1;
      ++pairs;
    }
  }
  if (pairs == 0) {
    throw Error(ErrorCode::kInsufficientAnnotators, "no two annotators share an item");
  }
  return sum / pairs;
}

double UnanimityRate(const ReliabilityMatrix& matrix) {
  if (matrix.size() < 2) {
    throw Error(ErrorCode::kInsufficientAnnotators, "unanimity needs at least two annotators");
  }
  size_t items = matrix.front().size();
  int eligible = 0, unanimous = 0;
  for (size_t u = 0; u < items; ++u) {
    auto values = ItemValues(matrix, u);
    if (values.size() < 2) continue;
    ++eligible;
    if (std::all_of(values.begin(), values.end(), [&](int v) { return v == values.front(); })) {
      ++unanimous;
    }
  }
  if (eligible == 0) {
    throw Error(ErrorCode::kInsufficientAnnotators, "no item carries two or more labels");
  }
  return static_cast<double>(unanimous) / eligible;
}

double ChiSquareCritical(int df, double alpha) {
  if (df < 1 || df > static_cast<int>(std::size(kCritical))) {
    throw Error(ErrorCode::kOutOfRange, "no critical values for df = " + std::to_string(df));
  }
  const CriticalRow& row = kCritical[df - 1];
  if (alpha == 0.05) return row.p05;
  if (alpha == 0.01) return row.p01;
  if (alpha == 0.001) return row.p001;
  throw Error(ErrorCode::kOutOfRange, "no critical values for alpha = " + std::to_string(alpha));
}

ChiSquareResult ChiSquareIndependence(std::span<const int64_t> a, std::span<const int64_t> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "count vectors differ in length");
  }
  ChiSquareResult r;
  std::vector<size_t> kept;
  int64_t row_a = 0, row_b = 0;
  for (size_t c = 0; c < a.size(); ++c) {
    if (a[c] < 0 || b[c] < 0) {
      throw Error(ErrorCode::kInvariantViolation, "negative count");
    }
    row_a += a[c];
    row_b += b[c];
    if (a[c] + b[c] == 0) {
      r.dropped_columns.push_back(static_cast<int>(c));
    } else {
      kept.push_back(c);
    }
  }
  if (row_a == 0 || row_b == 0) {
    throw Error(ErrorCode::kDegenerateData, "a distribution has no observations");
  }
  double n = static_cast<double>(row_a + row_b);
  for (size_t c : kept) {
    double col = static_cast<double>(a[c] + b[c]);
    for (auto [observed, row] : {std::pair{a[c], row_a}, std::pair{b[c], row_b}}) {
      double expected = row * col / n;
      double d = observed - expected;
      r.statistic += d * d / expected;
    }
  }
  r.df = static_cast<int>(kept.size()) - 1;
  r.p_bracket = "n.s.";
  if (r.df >= 1) {
    if (r.statistic > ChiSquareCritical(r.df, 0.001)) {
      r.p_bracket = "p<0.001";
    } else if (r.statistic > ChiSquareCritical(r.df, 0.01)) {
      r.p_bracket = "p<0.01";
    } else if (r.statistic > ChiSquareCritical(r.df, 0.05)) {
      r.p_bracket = "p<0.05";
    }
  }
  r.significant = r.p_bracket != "n.s.";
  return r;
}

std::vector<double> MidRanks(std::span<const double> xs) {
  std::vector<size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return xs[i] < xs[j]; });
  std::vector<double> ranks(xs.size());
  for (size_t i = 0; i < idx.size();) {
    size_t j = i;
    while (j + 1 < idx.size() && xs[idx[j + 1]] == xs[idx[i]]) ++j;
    double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t t = i; t <= j; ++t) ranks[idx[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

double SpearmanRho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3) {
    throw Error(ErrorCode::kLengthMismatch,
                "spearman needs two series of equal length >= 3 (got " +
                    std::to_string(xs.size()) + " and " + std::to_string(ys.size()) + ")");
  }
  auto rx = MidRanks(xs);
  auto ry = MidRanks(ys);
  double n = static_cast<double>(rx.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerateData, "spearman is undefined for a constant series");
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace qudeval::assess
