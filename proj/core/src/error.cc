// Copyright 2026 The ProsodyBench Authors. All Rights Reserved.
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

#include "prosodybench/error.h"

namespace prosodybench {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyAudio: return "EmptyAudio";
    case ErrorCode::kUnsupportedSampleRate: return "UnsupportedSampleRate";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kRangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::kNonPositiveIntensity: return "NonPositiveIntensity";
    case ErrorCode::kTooFewBins: return "TooFewBins";
    case ErrorCode::kEvenWindow: return "EvenWindow";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kEmptySegment: return "EmptySegment";
    case ErrorCode::kFrameRateMismatch: return "FrameRateMismatch";
    case ErrorCode::kTooFewSequences: return "TooFewSequences";
    case ErrorCode::kEmptyAfterDedup: return "EmptyAfterDedup";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegeneratePhoneSet: return "DegeneratePhoneSet";
    case ErrorCode::kTokenOutOfRange: return "TokenOutOfRange";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kSpecTooSmall: return "SpecTooSmall";
    case ErrorCode::kConfigInvalid: return "ConfigInvalid";
    case ErrorCode::kManifestBroken: return "ManifestBroken";
    case ErrorCode::kUtteranceSetMismatch: return "UtteranceSetMismatch";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace prosodybench
