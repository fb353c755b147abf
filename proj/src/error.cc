// Copyright 2026 The ConceptVec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "conceptvec/error.h"

namespace conceptvec {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "bad_magic";
    case ErrorCode::kUnsupportedVersion: return "unsupported_version";
    case ErrorCode::kUnsupportedDtype: return "unsupported_dtype";
    case ErrorCode::kTruncatedPayload: return "truncated_payload";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kInvalidShape: return "invalid_shape";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kSchema: return "schema";
    case ErrorCode::kDanglingReference: return "dangling_reference";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kNonFinite: return "non_finite";
    case ErrorCode::kMissingBundle: return "missing_bundle";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptySplit: return "empty_split";
    case ErrorCode::kNoSegmentation: return "no_segmentation";
    case ErrorCode::kDegenerateAlpha: return "degenerate_alpha";
    case ErrorCode::kZeroVector: return "zero_vector";
    case ErrorCode::kUnknownConcept: return "unknown_concept";
    case ErrorCode::kInfeasible: return "infeasible";
  }
  return "unknown";
}

Error::Error(ErrorCode code, std::string subject, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + " [" + subject +
                         "]: " + message),
      code_(code),
      subject_(std::move(subject)) {}

bool Error::is_data_error() const {
  switch (code_) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kUnknownConcept:
      return false;
    default:
      return true;
  }
}

}  // namespace conceptvec
