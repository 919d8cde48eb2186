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

#include "qudeval/common/error.h"

namespace qudeval {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kDanglingDocId: return "DanglingDocId";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kDuplicateEdgeId: return "DuplicateEdgeId";
    case ErrorCode::kUnknownArticleId: return "UnknownArticleId";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kNoNounPhrase: return "NoNounPhrase";
    case ErrorCode::kMissingSlot: return "MissingSlot";
    case ErrorCode::kUnknownTemplate: return "UnknownTemplate";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kFixtureMiss: return "FixtureMiss";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kUnparseableResponse: return "UnparseableResponse";
    case ErrorCode::kNonNumericResponse: return "NonNumericResponse";
    case ErrorCode::kEmptyCompletion: return "EmptyCompletion";
    case ErrorCode::kNoAnchorMatch: return "NoAnchorMatch";
    case ErrorCode::kNoSentenceMatch: return "NoSentenceMatch";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kEmptyValidation: return "EmptyValidation";
    case ErrorCode::kLabelOutsideOrder: return "LabelOutsideOrder";
    case ErrorCode::kDegenerateData: return "DegenerateData";
    case ErrorCode::kInsufficientAnnotators: return "InsufficientAnnotators";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kUsage: return "UsageError";
  }
  return "Unknown";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo:
    case ErrorCode::kProviderError:
    case ErrorCode::kProviderUnavailable:
    case ErrorCode::kFixtureMiss:
    case ErrorCode::kRateLimited:
      return 2;
    case ErrorCode::kUsage:
      return 64;
    default:
      return 1;
  }
}

}  // namespace qudeval
