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


// Statistics behind metric assessment and annotation studies.

#ifndef QUDEVAL_ASSESS_STATS_H_
#define QUDEVAL_ASSESS_STATS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qudeval::assess {

// Rows are gold labels, columns predicted labels, both in `labels` order.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<int64_t>> counts;

  explicit ConfusionMatrix(std::vector<std::string> order = {});
  int64_t total() const;
  int64_t tp(size_t c) const { return counts[c][c]; }
  int64_t fp(size_t c) const;
  int64_t fn(size_t c) const;
};

struct F1Report {
  ConfusionMatrix matrix;
  std::vector<double> per_class;
  // False for classes absent from both gold and predictions; those report
  // F1 = 0 and stay out of the macro average.
  std::vector<bool> counted;
  double macro_f1 = 0.0;
};

F1Report F1FromMatrix(ConfusionMatrix matrix);

// Per-class F1 = 2TP / (2TP + FP + FN). Throws LabelOutsideOrder for a label
// missing from `order` and LengthMismatch when the inputs differ in size.
F1Report ComputeF1(std::span<const std::string> predicted, std::span<const std::string> gold,
                   std::span<const std::string> order);

struct BaselineResult {
  std::vector<double> per_class;
  double macro_f1 = 0.0;
};

// Expected F1 of a classifier that samples labels from the gold
// distribution: precision = recall = g_c. Throws InvariantViolation unless
// `distribution` is non-negative and sums to 1.
BaselineResult RandomBaseline(std::span<const double> distribution);

// Draws `draws` independent (gold, predicted) pairs from `distribution` and
// scores them with ComputeF1's rules.
BaselineResult SimulateRandomBaseline(std::span<const double> distribution, int64_t draws,
                                      uint64_t seed);

enum class Level { kNominal, kOrdinal };

const char* LevelName(Level level);

// annotators x items; values are 0-based label ranks, nullopt when missing.
using ReliabilityMatrix = std::vector<std::vector<std::optional<int>>>;

// Krippendorff's alpha from the coincidence matrix over `num_values`
// ordered values. Ordinal distance is the squared cumulative-rank sum
// (sum_{g=c..k} n_g - (n_c + n_k) / 2)^2. Alpha is 1 when every pairable
// value is identical. Throws InsufficientAnnotators with fewer than two
// annotators and DegenerateData when no item has two values.
double KrippendorffAlpha(const ReliabilityMatrix& matrix, int num_values, Level level);

// Mean macro-F1 over ordered annotator pairs (a, b), a's labels taken as
// gold, each pair scored on the items both labeled.
double PairwiseF1(const ReliabilityMatrix& matrix, int num_values);

// Share of items with two or more values on which all values agree.
double UnanimityRate(const ReliabilityMatrix& matrix);

struct ChiSquareResult {
  double statistic = 0.0;
  int df = 0;
  // "p<0.001", "p<0.01", "p<0.05" or "n.s."
  std::string p_bracket;
  bool significant = false;  // p < 0.05
  // Label columns with no observations in either row; removed before the
  // test, which lowers df.
  std::vector<int> dropped_columns;
};

// Pearson chi-square on the 2 x |L| table formed by two count vectors.
// Throws LengthMismatch, InvariantViolation on negative counts and
// DegenerateData when a row is empty.
ChiSquareResult ChiSquareIndependence(std::span<const int64_t> a, std::span<const int64_t> b);

// Upper critical value of chi-square with `df` degrees of freedom at
// alpha in {0.05, 0.01, 0.001}; df in 1..10.
double ChiSquareCritical(int df, double alpha);

// Ranks with ties sharing their mean (1-based) position.
std::vector<double> MidRanks(std::span<const double> xs);

// Pearson correlation of mid-ranks. Throws LengthMismatch for unequal or
// shorter-than-3 inputs and DegenerateData when a side is constant.
double SpearmanRho(std::span<const double> xs, std::span<const double> ys);

}  // namespace qudeval::assess

#endif  // QUDEVAL_ASSESS_STATS_H_
