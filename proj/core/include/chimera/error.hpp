// Copyright 2026 The Chimera Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chimera {

// Every failure raised by the library carries one of these codes so the CLI
// and the HTTP service can map it to an exit code or a JSON error body.
enum class ErrorCode {
  kMalformedLine,
  kEmptyTier,
  kNonContiguous,
  kInvalidSegment,
  kUnknownPhone,
  kEmptySequence,
  kInconsistentPath,
  kNoPairedRun,
  kModeUnsatisfiable,
  kSampleRateMismatch,
  kRangeOutOfBounds,
  kInsufficientOverlap,
  kUnsupportedFormat,
  kTruncatedFile,
  kSignalTooShort,
  kEmptyFeatureMatrix,
  kEmptyReference,
  kEmptyCorpus,
  kDimensionMismatch,
  kMissingAnnotation,
  kUnparseablePath,
  kMissingModel,
  kMissingStimuli,
  kUnknownCondition,
  kInsufficientStimuli,
  kUnknownSession,
  kUnknownStimulus,
  kDuplicateResponse,
  kOutOfOrder,
  kPlaybackLimit,
  kSessionIncomplete,
  kBadModelFile,
  kIo,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace chimera
