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

#include "chimera/error.hpp"

namespace chimera {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kEmptyTier: return "EmptyTier";
    case ErrorCode::kNonContiguous: return "NonContiguous";
    case ErrorCode::kInvalidSegment: return "InvalidSegment";
    case ErrorCode::kUnknownPhone: return "UnknownPhone";
    case ErrorCode::kEmptySequence: return "EmptySequence";
    case ErrorCode::kInconsistentPath: return "InconsistentPath";
    case ErrorCode::kNoPairedRun: return "NoPairedRun";
    case ErrorCode::kModeUnsatisfiable: return "ModeUnsatisfiable";
    case ErrorCode::kSampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::kRangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::kInsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kSignalTooShort: return "SignalTooShort";
    case ErrorCode::kEmptyFeatureMatrix: return "EmptyFeatureMatrix";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kMissingAnnotation: return "MissingAnnotation";
    case ErrorCode::kUnparseablePath: return "UnparseablePath";
    case ErrorCode::kMissingModel: return "MissingModel";
    case ErrorCode::kMissingStimuli: return "MissingStimuli";
    case ErrorCode::kUnknownCondition: return "UnknownCondition";
    case ErrorCode::kInsufficientStimuli: return "InsufficientStimuli";
    case ErrorCode::kUnknownSession: return "UnknownSession";
    case ErrorCode::kUnknownStimulus: return "UnknownStimulus";
    case ErrorCode::kDuplicateResponse: return "DuplicateResponse";
    case ErrorCode::kOutOfOrder: return "OutOfOrder";
    case ErrorCode::kPlaybackLimit: return "PlaybackLimit";
    case ErrorCode::kSessionIncomplete: return "SessionIncomplete";
    case ErrorCode::kBadModelFile: return "BadModelFile";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace chimera
