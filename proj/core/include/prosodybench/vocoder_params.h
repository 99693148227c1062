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

#ifndef PROSODYBENCH_VOCODER_PARAMS_H_
#define PROSODYBENCH_VOCODER_PARAMS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "prosodybench/matrix.h"

namespace prosodybench {

// Frame-wise vocoder decomposition of an utterance: fundamental frequency,
// spectral envelope and aperiodicity. Frame t covers
// [t * frame_period_ms, (t + 1) * frame_period_ms).
//
// Invariants (checked by ValidateParamTrack):
//   f0[t] >= 0, with 0 marking an unvoiced frame;
//   sp is T x F linear power, every entry >= 0;
//   ap is T x F, every entry in [0, 1];
//   frame_period_ms > 0 and sample_rate_hz > 0.
struct ParamTrack {
  std::vector<double> f0;
  Matrix sp;
  Matrix ap;
  double frame_period_ms = 5.0;
  std::uint32_t sample_rate_hz = 16000;

  std::size_t frames() const { return f0.size(); }
  std::size_t bins() const { return sp.cols(); }

  friend bool operator==(const ParamTrack&, const ParamTrack&) = default;
};

// Throws Error(kInvariantViolation) describing the first violated invariant.
void ValidateParamTrack(const ParamTrack& track);

// A labelled time interval from an alignment tier.
struct Segment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Half-open frame interval [start, end).
struct FrameRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > start ? end - start : 0; }
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

// start = floor(start_s * 1000 / period), end = ceil(end_s * 1000 / period).
// Quotients within 1e-9 of an integer are snapped to it first, so decimal
// second values such as 0.3 s do not pick up a spurious extra frame.
FrameRange SegmentToFrames(const Segment& segment, double frame_period_ms);

struct AnalysisConfig {
  double frame_period_ms = 5.0;
  std::size_t fft_size = 512;
  std::size_t cepstral_order = 40;
  double f0_floor_hz = 50.0;
  double f0_ceil_hz = 500.0;
  double voicing_threshold = 0.3;
};

// Simplified analyzer: normalized-autocorrelation f0, cepstrally smoothed
// STFT power for sp, and a per-frame noise ratio broadcast across bins for
// ap. Produces ceil(duration_ms / frame_period_ms) frames.
ParamTrack Analyze(std::span<const double> samples, std::uint32_t sample_rate_hz,
                   const AnalysisConfig& config = {});

// Pulse-train / noise excitation shaped by sp through weighted overlap-add.
// The output is a pure function of (track, seed).
std::vector<double> Synthesize(const ParamTrack& track, std::uint64_t seed = 0);

// "PBPT" parameter file. Payload values are stored as float32, so a round
// trip is bit-exact for tracks whose values are float32-representable.
void WriteParamTrack(const ParamTrack& track, const std::filesystem::path& path);
ParamTrack ReadParamTrack(const std::filesystem::path& path);

}  // namespace prosodybench

#endif  // PROSODYBENCH_VOCODER_PARAMS_H_
