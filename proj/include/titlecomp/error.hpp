// Copyright 2026 The Titlecomp Authors.
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

#ifndef TITLECOMP_ERROR_HPP
#define TITLECOMP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace titlecomp {

enum class ErrorCode {
  kEmptyInput,
  kLengthMismatch,
  kEmptyCorpus,
  kSizeTooLarge,
  kMalformedFile,
  kInconsistentDimension,
  kDimensionMismatch,
  kCoverageMismatch,
  kCategoryTooSmall,
  kMalformedRow,
  kMissingClass,
  kIo,
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kSizeTooLarge: return "SizeTooLarge";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kInconsistentDimension: return "InconsistentDimension";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kCoverageMismatch: return "CoverageMismatch";
    case ErrorCode::kCategoryTooSmall: return "CategoryTooSmall";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kMissingClass: return "MissingClass";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

// All library failures surface as this exception; code() identifies the
// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace titlecomp

#endif  // TITLECOMP_ERROR_HPP
