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

#include "prosodybench/prosody_mod.h"

#include <cmath>
#include <string>
#include <vector>

#include "prosodybench/error.h"

namespace prosodybench {
namespace {

void RequirePositive(double scale, const char* name) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(name) + " must be a positive finite scale");
  }
}

void RequireRange(const ParamTrack& track, FrameRange frames) {
  if (!(frames.start < frames.end && frames.end <= track.frames())) {
    throw Error(ErrorCode::kRangeOutOfBounds,
                "frame range [" + std::to_string(frames.start) + ", " +
                    std::to_string(frames.end) + ") invalid for " +
                    std::to_string(track.frames()) + " frames");
  }
}

double FrameIntensity(std::span<const double> row) {
  double sum = 0.0;
  for (double v : row) sum += v;
  return sum / static_cast<double>(row.size());
}

}  // namespace

ParamTrack ModifyWordPitch(const ParamTrack& track, FrameRange frames, double alpha) {
  RequirePositive(alpha, "alpha");
  RequireRange(track, frames);
  ParamTrack out = track;
  for (std::size_t t = frames.start; t < frames.end; ++t) out.f0[t] = alpha * track.f0[t];
  return out;
}

ParamTrack ModifyWordIntensity(const ParamTrack& track, FrameRange frames, double beta) {
  RequirePositive(beta, "beta");
  RequireRange(track, frames);
  ParamTrack out = track;
  for (std::size_t t = frames.start; t < frames.end; ++t) {
    for (double& v : out.sp.row(t)) v *= beta;
  }
  return out;
}

ParamTrack ModifyUtterancePitchRange(const ParamTrack& track, double alpha) {
  RequirePositive(alpha, "alpha");
  double sum = 0.0;
  std::size_t voiced = 0;
  for (double f : track.f0) {
    if (f > 0.0) {
      sum += f;
      ++voiced;
    }
  }
  ParamTrack out = track;
  // (f - mean) + mean is not always f in floating point; alpha == 1 must be
  // an exact identity.
  if (voiced == 0 || alpha == 1.0) return out;
  const double mean = sum / static_cast<double>(voiced);
  for (double& f : out.f0) {
    if (f > 0.0) f = std::max(alpha * (f - mean) + mean, kMinVoicedF0Hz);
  }
  return out;
}

ParamTrack ModifyUtteranceIntensityRange(const ParamTrack& track, double beta) {
  RequirePositive(beta, "beta");
  const std::size_t frames = track.frames();
  std::vector<double> log_intensity(frames, 0.0);
  double sum = 0.0;
  std::size_t voiced = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    if (!(track.f0[t] > 0.0)) continue;
    const double intensity = FrameIntensity(track.sp.row(t));
    if (!(intensity > 0.0)) {
      throw Error(ErrorCode::kNonPositiveIntensity,
                  "voiced frame " + std::to_string(t) + " has zero intensity");
    }
    log_intensity[t] = std::log(intensity);
    sum += log_intensity[t];
    ++voiced;
  }
  ParamTrack out = track;
  if (voiced == 0) return out;
  const double mean = sum / static_cast<double>(voiced);
  for (std::size_t t = 0; t < frames; ++t) {
    if (!(track.f0[t] > 0.0)) continue;
    const double target = beta * (log_intensity[t] - mean) + mean;
    const double gain = std::exp(target - log_intensity[t]);
    for (double& v : out.sp.row(t)) v *= gain;
  }
  return out;
}

ParamTrack WarpSpeaker(const ParamTrack& track, double gamma) {
  RequirePositive(gamma, "gamma");
  const std::size_t bins = track.bins();
  ParamTrack out = track;
  if (bins == 0) return out;
  const std::size_t last = bins - 1;
  for (std::size_t t = 0; t < track.frames(); ++t) {
    std::span<const double> src = track.sp.row(t);
    std::span<double> dst = out.sp.row(t);
    for (std::size_t f = 0; f < bins; ++f) {
      const double pos = static_cast<double>(f) / gamma;
      const double base = std::floor(pos);
      const double frac = pos - base;
      const std::size_t lo = base >= static_cast<double>(last) ? last : static_cast<std::size_t>(base);
      const std::size_t hi = std::min(lo + 1, last);
      dst[f] = (1.0 + base - pos) * src[lo] + frac * src[hi];
    }
  }
  return out;
}

}  // namespace prosodybench
