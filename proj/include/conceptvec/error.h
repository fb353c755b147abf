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

#ifndef CONCEPTVEC_ERROR_H_
#define CONCEPTVEC_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace conceptvec {

enum class ErrorCode {
  kBadMagic,
  kUnsupportedVersion,
  kUnsupportedDtype,
  kTruncatedPayload,
  kShapeMismatch,
  kInvalidShape,
  kIo,
  kSchema,
  kDanglingReference,
  kDuplicateId,
  kNonFinite,
  kMissingBundle,
  kInvalidArgument,
  kEmptySplit,
  kNoSegmentation,
  kDegenerateAlpha,
  kZeroVector,
  kUnknownConcept,
  kInfeasible,
};

std::string_view ErrorCodeName(ErrorCode code);

/// Every failure in the library is raised as an Error carrying a code and
/// the entity or field it concerns (a file path, a concept id, a header
/// field name).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& message);

  ErrorCode code() const { return code_; }
  const std::string& subject() const { return subject_; }

  /// True for errors caused by malformed or inconsistent input data, as
  /// opposed to invalid caller arguments.
  bool is_data_error() const;

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace conceptvec

#endif  // CONCEPTVEC_ERROR_H_
