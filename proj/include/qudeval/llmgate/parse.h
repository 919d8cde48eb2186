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


// Turning free-text completions into option numbers and scores.

#ifndef QUDEVAL_LLMGATE_PARSE_H_
#define QUDEVAL_LLMGATE_PARSE_H_

#include <span>
#include <string>
#include <string_view>

namespace qudeval::llmgate {

// 1-based option number selected in `response`. Rules, first hit wins:
//   1. a bracketed "[n: ...]" or "[n]" with n in range;
//   2. a bare option number leading the trimmed response;
//   3. exactly one option name occurring as a case-insensitive substring;
//   4. exactly one distinct in-range number standing alone anywhere.
// Throws UnparseableResponse when no rule fires and InvariantViolation for
// an empty option set.
int ParseOption(std::string_view response, std::span<const std::string> option_names);

struct ParsedScore {
  double value = 0.0;  // clamped into [lo, hi]
  double raw = 0.0;    // as written in the response
  bool clamped = false;
};

// First decimal number in `response` ("Score: 3.5" -> 3.5, "85/100" -> 85).
// Throws NonNumericResponse when there is none.
ParsedScore ParseScore(std::string_view response, double lo, double hi);

// First non-empty line with surrounding whitespace, quotes and an optional
// "<label>:" prefix removed. Empty result when the text is blank.
std::string FirstLine(std::string_view response, std::string_view label = "");

}  // namespace qudeval::llmgate

#endif  // QUDEVAL_LLMGATE_PARSE_H_
