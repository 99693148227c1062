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

#ifndef PROSODYBENCH_PROSODY_MOD_H_
#define PROSODYBENCH_PROSODY_MOD_H_

#include "prosodybench/vocoder_params.h"

// Prosody and speaker modifications as pure transforms on ParamTrack. None
// of these functions mutate their input.
namespace prosodybench {

// Pitch, intensity and frequency-warp factors. All must be positive.
struct ScaleFactors {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
};

// Lowest f0 produced by ModifyUtterancePitchRange for a voiced frame.
inline constexpr double kMinVoicedF0Hz = 1.0;

// f0[t] *= alpha for t in `frames`. Throws kRangeOutOfBounds unless
// 0 <= start < end <= T.
ParamTrack ModifyWordPitch(const ParamTrack& track, FrameRange frames, double alpha);

// sp[t][*] *= beta for t in `frames`, uniformly across frequency.
ParamTrack ModifyWordIntensity(const ParamTrack& track, FrameRange frames, double beta);

// Scales each voiced frame's deviation from the voiced-frame mean f0 by
// alpha. Results below kMinVoicedF0Hz are raised to it so the voiced set is
// unchanged. No-op when no frame is voiced.
ParamTrack ModifyUtterancePitchRange(const ParamTrack& track, double alpha);

// Scales each voiced frame's log intensity (log of the mean sp over bins)
// about the voiced-frame mean by beta, applying the resulting gain to the
// whole sp row. Throws kNonPositiveIntensity for a voiced frame with zero
// intensity.
ParamTrack ModifyUtteranceIntensityRange(const ParamTrack& track, double beta);

// Vocal-tract-length warp: output bin f reads the input envelope at f / gamma
// with linear interpolation, clamping source positions past the last bin.
ParamTrack WarpSpeaker(const ParamTrack& track, double gamma);

}  // namespace prosodybench

#endif  // PROSODYBENCH_PROSODY_MOD_H_
