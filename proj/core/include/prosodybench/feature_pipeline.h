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

#ifndef PROSODYBENCH_FEATURE_PIPELINE_H_
#define PROSODYBENCH_FEATURE_PIPELINE_H_

#include <cstddef>
#include <filesystem>
#include <string>

#include "prosodybench/matrix.h"
#include "prosodybench/vocoder_params.h"

namespace prosodybench {

// Frame-wise feature vectors, T' x D. Either native log-mel energies or
// model-layer features exported by an external tool.
struct FeatureMatrix {
  Matrix data;
  double frame_period_ms = 5.0;
  std::string source_tag;

  std::size_t frames() const { return data.rows(); }
  std::size_t dims() const { return data.cols(); }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

// Throws kDimensionMismatch for an empty matrix and kNonFiniteValue for
// NaN or infinite entries.
void ValidateFeatureMatrix(const FeatureMatrix& features);

// HTK-style triangular mel filters spanning 0 Hz to Nyquist, as an
// n_mels x bins weight matrix. A filter narrower than one bin gets unit
// weight on the bin nearest its center so no channel is identically zero.
Matrix MelFilterbank(std::size_t bins, std::size_t n_mels, double sample_rate_hz);

inline constexpr double kLogMelFloor = 1e-30;

// Per frame: log(max(W * sp[t], kLogMelFloor)) for the filterbank W, plus
// log(1 + f0[t]) as a final channel when use_f0_channel is set. Keeps the
// track's frame rate. Throws kTooFewBins when F < n_mels and
// kInvalidArgument when n_mels < 8.
FeatureMatrix ExtractLogMel(const ParamTrack& track, std::size_t n_mels,
                            bool use_f0_channel);

// Centered moving average of odd width W = 2w + 1. Near the edges the
// window is truncated to the frames that exist. Throws kEvenWindow.
FeatureMatrix MovingAverage(const FeatureMatrix& features, std::size_t window);

// Per-dimension zero mean, unit (population) variance over the utterance.
// Dimensions whose standard deviation is below 1e-8 are only centered.
// Throws kTooShort for fewer than two frames.
FeatureMatrix NormalizePerUtterance(const FeatureMatrix& features);

// "PBFT" feature file; the exchange format with external feature exporters.
void WriteFeatures(const FeatureMatrix& features, const std::filesystem::path& path);
FeatureMatrix ReadFeatures(const std::filesystem::path& path);

}  // namespace prosodybench

#endif  // PROSODYBENCH_FEATURE_PIPELINE_H_
