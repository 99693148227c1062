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

#include "prosodybench/feature_pipeline.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binary_io.h"
#include "prosodybench/error.h"

namespace prosodybench {
namespace {

constexpr char kFeatureMagic[] = "PBFT";
constexpr std::uint16_t kFeatureVersion = 1;

double HzToMel(double hz) { return 1127.0 * std::log1p(hz / 700.0); }
double MelToHz(double mel) { return 700.0 * std::expm1(mel / 1127.0); }

}  // namespace

void ValidateFeatureMatrix(const FeatureMatrix& features) {
  if (features.frames() == 0 || features.dims() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "feature matrix is empty");
  }
  if (!(features.frame_period_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "feature frame period must be positive");
  }
  for (std::size_t t = 0; t < features.frames(); ++t) {
    for (double v : features.data.row(t)) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kNonFiniteValue,
                    "non-finite feature value at frame " + std::to_string(t));
      }
    }
  }
}

Matrix MelFilterbank(std::size_t bins, std::size_t n_mels, double sample_rate_hz) {
  Matrix weights(n_mels, bins);
  const double nyquist = sample_rate_hz / 2.0;
  const double mel_max = HzToMel(nyquist);
  const double bin_hz = bins > 1 ? nyquist / static_cast<double>(bins - 1) : nyquist;

  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = MelToHz(mel_max * static_cast<double>(i) / static_cast<double>(n_mels + 1));
  }
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    double total = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (hz > left && hz <= center) {
        w = (hz - left) / (center - left);
      } else if (hz > center && hz < right) {
        w = (right - hz) / (right - center);
      }
      weights(m, k) = w;
      total += w;
    }
    if (total <= 0.0) {
      const auto nearest = static_cast<std::size_t>(std::lround(center / bin_hz));
      weights(m, std::min(nearest, bins - 1)) = 1.0;
    }
  }
  return weights;
}

FeatureMatrix ExtractLogMel(const ParamTrack& track, std::size_t n_mels,
                            bool use_f0_channel) {
  if (n_mels < 8) {
    throw Error(ErrorCode::kInvalidArgument, "n_mels must be at least 8");
  }
  if (track.bins() < n_mels) {
    throw Error(ErrorCode::kTooFewBins,
                std::to_string(track.bins()) + " envelope bins cannot feed " +
                    std::to_string(n_mels) + " mel channels");
  }
  ValidateParamTrack(track);
  if (track.frames() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "track has no frames");
  }

  const Matrix filters = MelFilterbank(track.bins(), n_mels, track.sample_rate_hz);
  const std::size_t dims = n_mels + (use_f0_channel ? 1 : 0);
  FeatureMatrix out;
  out.data = Matrix(track.frames(), dims);
  out.frame_period_ms = track.frame_period_ms;
  out.source_tag = use_f0_channel ? "native:logmel" + std::to_string(n_mels) + "+f0"
                                  : "native:logmel" + std::to_string(n_mels);
  for (std::size_t t = 0; t < track.frames(); ++t) {
    std::span<const double> sp = track.sp.row(t);
    std::span<double> row = out.data.row(t);
    for (std::size_t m = 0; m < n_mels; ++m) {
      std::span<const double> w = filters.row(m);
      double energy = 0.0;
      for (std::size_t k = 0; k < sp.size(); ++k) energy += w[k] * sp[k];
      row[m] = std::log(std::max(energy, kLogMelFloor));
    }
    if (use_f0_channel) row[n_mels] = std::log1p(track.f0[t]);
  }
  return out;
}

FeatureMatrix MovingAverage(const FeatureMatrix& features, std::size_t window) {
  if (window == 0 || window % 2 == 0) {
    throw Error(ErrorCode::kEvenWindow,
                "moving-average window must be odd, got " + std::to_string(window));
  }
  const std::size_t half = window / 2;
  const std::size_t frames = features.frames();
  const std::size_t dims = features.dims();
  FeatureMatrix out = features;
  if (half == 0) return out;
  for (std::size_t i = 0; i < frames; ++i) {
    const std::size_t first = i >= half ? i - half : 0;
    const std::size_t last = std::min(frames - 1, i + half);
    const auto count = static_cast<double>(last - first + 1);
    std::span<double> dst = out.data.row(i);
    for (std::size_t d = 0; d < dims; ++d) {
      double sum = 0.0;
      for (std::size_t j = first; j <= last; ++j) sum += features.data(j, d);
      dst[d] = sum / count;
    }
  }
  return out;
}

FeatureMatrix NormalizePerUtterance(const FeatureMatrix& features) {
  const std::size_t frames = features.frames();
  if (frames < 2) {
    throw Error(ErrorCode::kTooShort, "normalization needs at least two frames");
  }
  FeatureMatrix out = features;
  const auto n = static_cast<double>(frames);
  for (std::size_t d = 0; d < features.dims(); ++d) {
    double mean = 0.0;
    for (std::size_t t = 0; t < frames; ++t) mean += features.data(t, d);
    mean /= n;
    double var = 0.0;
    for (std::size_t t = 0; t < frames; ++t) {
      const double dev = features.data(t, d) - mean;
      var += dev * dev;
    }
    const double sd = std::sqrt(var / n);
    const double inv = sd < 1e-8 ? 1.0 : 1.0 / sd;
    for (std::size_t t = 0; t < frames; ++t) {
      out.data(t, d) = (features.data(t, d) - mean) * inv;
    }
  }
  return out;
}

void WriteFeatures(const FeatureMatrix& features, const std::filesystem::path& path) {
  ValidateFeatureMatrix(features);
  if (features.source_tag.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "source tag too long");
  }
  internal::ByteWriter w;
  w.Magic({kFeatureMagic, 4});
  w.U16(kFeatureVersion);
  w.U32(static_cast<std::uint32_t>(features.frames()));
  w.U32(static_cast<std::uint32_t>(features.dims()));
  w.F64(features.frame_period_ms);
  w.U16(static_cast<std::uint16_t>(features.source_tag.size()));
  w.Bytes(features.source_tag);
  w.F32Array(features.data.values());
  internal::WriteFileAtomic(path, w.buffer());
}

FeatureMatrix ReadFeatures(const std::filesystem::path& path) {
  internal::ByteReader r(internal::ReadFileBytes(path));
  r.ExpectMagic({kFeatureMagic, 4});
  const std::uint16_t version = r.U16();
  if (version != kFeatureVersion) {
    throw Error(ErrorCode::kBadMagic,
                "unsupported PBFT version " + std::to_string(version));
  }
  const std::size_t frames = r.U32();
  const std::size_t dims = r.U32();
  FeatureMatrix out;
  out.frame_period_ms = r.F64();
  out.source_tag = r.Bytes(r.U16());
  if (r.remaining() != frames * dims * sizeof(float)) {
    throw Error(ErrorCode::kDimensionMismatch,
                path.string() + ": header says T'=" + std::to_string(frames) +
                    ", D=" + std::to_string(dims) + " but payload has " +
                    std::to_string(r.remaining()) + " bytes");
  }
  out.data = Matrix(frames, dims);
  r.F32Array(out.data.values());
  ValidateFeatureMatrix(out);
  return out;
}

}  // namespace prosodybench
