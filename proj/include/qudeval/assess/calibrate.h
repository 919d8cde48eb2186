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


// Threshold search for score-to-label mappings.

#ifndef QUDEVAL_ASSESS_CALIBRATE_H_
#define QUDEVAL_ASSESS_CALIBRATE_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qudeval/metrics/mapping.h"

namespace qudeval::assess {

struct CalibrationInput {
  std::string mapping_id;
  metrics::Criterion criterion = metrics::Criterion::kComp;
  // Best label first; the mapping sends higher scores to earlier labels.
  std::vector<std::string> labels;
  double lo = 0.0;
  double hi = 1.0;
  // Candidate thresholds. Empty means a regular grid over [lo, hi] with
  // step 1 when the range is wider than 1.5 and 0.01 otherwise.
  std::vector<double> grid;
};

struct CalibrationResult {
  metrics::MappingFunction mapping;  // every threshold inclusive: score >= t
  double macro_f1 = 0.0;
  int evaluated_tuples = 0;
  std::vector<std::string> warnings;  // e.g. a label with no gold example
};

std::vector<double> DefaultGrid(double lo, double hi);

// Tries every strictly decreasing threshold tuple drawn from the grid and
// keeps the one with the highest macro-F1 (F1 rules of ComputeF1). Ties go
// to the widest span between the first and last threshold, then to the
// lexicographically smallest tuple read from the last threshold up.
// Throws EmptyValidation for no scores, LengthMismatch, OutOfRange for a
// score outside [lo, hi] and LabelOutsideOrder for an unknown gold label.
CalibrationResult CalibrateMapping(std::span<const double> scores,
                                   std::span<const std::string> gold,
                                   const CalibrationInput& input);

}  // namespace qudeval::assess

#endif  // QUDEVAL_ASSESS_CALIBRATE_H_
