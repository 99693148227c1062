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

#ifndef PROSODYBENCH_ERROR_H_
#define PROSODYBENCH_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace prosodybench {

// Every failure the toolkit reports carries one of these codes. The CLI
// prints the code name in its machine-readable error record.
enum class ErrorCode {
  kEmptyAudio,
  kUnsupportedSampleRate,
  kInvariantViolation,
  kIoFailure,
  kBadMagic,
  kDimensionMismatch,
  kRangeOutOfBounds,
  kNonPositiveIntensity,
  kTooFewBins,
  kEvenWindow,
  kTooShort,
  kNonFiniteValue,
  kTooFewSamples,
  kEmptyReference,
  kEmptySegment,
  kFrameRateMismatch,
  kTooFewSequences,
  kEmptyAfterDedup,
  kLengthMismatch,
  kDegeneratePhoneSet,
  kTokenOutOfRange,
  kZeroVariance,
  kSpecTooSmall,
  kConfigInvalid,
  kManifestBroken,
  kUtteranceSetMismatch,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace prosodybench

#endif  // PROSODYBENCH_ERROR_H_
