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

#ifndef QUDEVAL_COMMON_ERROR_H_
#define QUDEVAL_COMMON_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace qudeval {

// Every failure the toolkit reports carries one of these codes. The CLI maps
// them onto exit statuses (see ExitCodeFor).
enum class ErrorCode {
  // corpus
  kSchemaViolation,
  kDanglingDocId,
  kIndexOutOfRange,
  kDuplicateEdgeId,
  kUnknownArticleId,
  kInvariantViolation,
  // textkit
  kNoNounPhrase,
  // llmgate
  kMissingSlot,
  kUnknownTemplate,
  kProviderError,
  kFixtureMiss,
  kRateLimited,
  kUnparseableResponse,
  kNonNumericResponse,
  // metrics / qudparse
  kEmptyCompletion,
  kNoAnchorMatch,
  kNoSentenceMatch,
  kProviderUnavailable,
  kOutOfRange,
  // assess
  kEmptyValidation,
  kLabelOutsideOrder,
  kDegenerateData,
  kInsufficientAnnotators,
  kLengthMismatch,
  // plumbing
  kIo,
  kUsage,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// 1 for validation problems, 2 for I/O and provider failures, 64 for usage.
int ExitCodeFor(ErrorCode code);

}  // namespace qudeval

#endif  // QUDEVAL_COMMON_ERROR_H_
