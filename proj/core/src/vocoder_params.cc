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

#include "prosodybench/vocoder_params.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "binary_io.h"
#include "fft.h"
#include "prosodybench/error.h"
#include "random.h"

namespace prosodybench {
namespace {

constexpr char kParamMagic[] = "PBPT";
constexpr std::uint16_t kParamVersion = 1;
constexpr double kPowerFloor = 1e-12;

[[noreturn]] void Violation(const std::string& what) {
  throw Error(ErrorCode::kInvariantViolation, "ParamTrack: " + what);
}

double SnapToInteger(double x) {
  const double r = std::round(x);
  return std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x)) ? r : x;
}

// Copies samples [center - n/2, center - n/2 + n) with zero padding.
void CenteredFrame(std::span<const double> samples, std::ptrdiff_t center,
                   std::span<double> out) {
  const std::ptrdiff_t begin = center - static_cast<std::ptrdiff_t>(out.size() / 2);
  const auto total = static_cast<std::ptrdiff_t>(samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::ptrdiff_t idx = begin + static_cast<std::ptrdiff_t>(i);
    out[i] = (idx >= 0 && idx < total) ? samples[static_cast<std::size_t>(idx)]
                                       : 0.0;
  }
}

struct PitchEstimate {
  double f0_hz = 0.0;
  double confidence = 0.0;
};

// Normalized autocorrelation over [min_lag - 1, max_lag + 1]. Picks the
// shortest lag whose peak is within 85% of the best one, which suppresses
// period doubling, and refines it with parabolic interpolation.
PitchEstimate EstimatePitch(std::span<const double> frame, std::size_t min_lag,
                            std::size_t max_lag, double threshold,
                            double sample_rate) {
  const std::size_t n = frame.size();
  double energy = 0.0;
  for (double v : frame) energy += v * v;
  if (energy <= 1e-10 * static_cast<double>(n)) return {};

  const std::size_t lo = min_lag - 1;
  const std::size_t hi = max_lag + 1;
  std::vector<double> r(hi + 1, 0.0);
  for (std::size_t lag = lo; lag <= hi && lag < n; ++lag) {
    double cross = 0.0, e0 = 0.0, e1 = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) {
      cross += frame[i] * frame[i + lag];
      e0 += frame[i] * frame[i];
      e1 += frame[i + lag] * frame[i + lag];
    }
    const double denom = std::sqrt(e0 * e1);
    r[lag] = denom > 0.0 ? cross / denom : 0.0;
  }

  double best = -1.0;
  for (std::size_t lag = min_lag; lag <= max_lag; ++lag) best = std::max(best, r[lag]);
  if (best < threshold) return {0.0, std::max(best, 0.0)};

  std::size_t chosen = min_lag;
  for (std::size_t lag = min_lag; lag <= max_lag; ++lag) {
    const bool peak = r[lag] >= r[lag - 1] && r[lag] >= r[lag + 1];
    if (peak && r[lag] >= 0.85 * best) {
      chosen = lag;
      break;
    }
  }

  double offset = 0.0;
  const double a = r[chosen - 1], b = r[chosen], c = r[chosen + 1];
  const double curvature = a - 2.0 * b + c;
  if (curvature < 0.0) offset = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
  return {sample_rate / (static_cast<double>(chosen) + offset), r[chosen]};
}

// Cepstral smoothing of a power spectrum: keep quefrencies below `order`.
void SmoothEnvelope(const internal::RealFft& fft, std::span<double> power,
                    std::size_t order) {
  const std::size_t n = fft.size();
  const std::size_t bins = fft.bins();
  std::vector<std::complex<double>> spectrum(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    spectrum[k] = std::log(std::max(power[k], kPowerFloor));
  }
  std::vector<double> cepstrum(n);
  fft.Inverse(spectrum, cepstrum);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t dist = std::min(q, n - q);
    cepstrum[q] = dist < order ? cepstrum[q] * scale : 0.0;
  }
  fft.Forward(cepstrum, spectrum);
  for (std::size_t k = 0; k < bins; ++k) power[k] = std::exp(spectrum[k].real());
}

}  // namespace

void ValidateParamTrack(const ParamTrack& track) {
  const std::size_t frames = track.f0.size();
  if (!(track.frame_period_ms > 0.0) || !std::isfinite(track.frame_period_ms)) {
    Violation("frame_period_ms must be positive");
  }
  if (track.sample_rate_hz == 0) Violation("sample_rate_hz must be positive");
  if (track.sp.rows() != frames || track.ap.rows() != frames) {
    Violation("f0, sp and ap frame counts differ");
  }
  if (track.sp.cols() != track.ap.cols()) Violation("sp and ap bin counts differ");
  for (double v : track.f0) {
    if (!(v >= 0.0) || !std::isfinite(v)) Violation("f0 must be finite and >= 0");
  }
  for (double v : track.sp.values()) {
    if (!(v >= 0.0) || !std::isfinite(v)) Violation("sp must be finite and >= 0");
  }
  for (double v : track.ap.values()) {
    if (!(v >= 0.0 && v <= 1.0)) Violation("ap must lie in [0, 1]");
  }
}

FrameRange SegmentToFrames(const Segment& segment, double frame_period_ms) {
  if (!(frame_period_ms > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "frame period must be positive");
  }
  if (!(segment.start_s >= 0.0) || !(segment.end_s > segment.start_s)) {
    throw Error(ErrorCode::kInvalidArgument,
                "segment '" + segment.label + "' must satisfy 0 <= start < end");
  }
  const double start = SnapToInteger(segment.start_s * 1000.0 / frame_period_ms);
  const double end = SnapToInteger(segment.end_s * 1000.0 / frame_period_ms);
  return {static_cast<std::size_t>(std::floor(start)),
          static_cast<std::size_t>(std::ceil(end))};
}

ParamTrack Analyze(std::span<const double> samples, std::uint32_t sample_rate_hz,
                   const AnalysisConfig& config) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyAudio, "no audio samples");
  if (sample_rate_hz < 8000) {
    throw Error(ErrorCode::kUnsupportedSampleRate,
                "sample rate " + std::to_string(sample_rate_hz) + " Hz < 8000 Hz");
  }
  if (!(config.frame_period_ms > 0.0) || config.fft_size < 16 ||
      (config.fft_size & (config.fft_size - 1)) != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "analysis needs a positive frame period and power-of-two FFT size");
  }

  const double rate = static_cast<double>(sample_rate_hz);
  const double duration_ms = static_cast<double>(samples.size()) * 1000.0 / rate;
  const auto frames = static_cast<std::size_t>(
      std::ceil(SnapToInteger(duration_ms / config.frame_period_ms)));
  const double hop = config.frame_period_ms * rate / 1000.0;

  const auto min_lag = static_cast<std::size_t>(std::floor(rate / config.f0_ceil_hz));
  const auto max_lag = static_cast<std::size_t>(std::ceil(rate / config.f0_floor_hz));
  const std::size_t pitch_window = 2 * max_lag + 2;

  const internal::RealFft fft(config.fft_size);
  const std::vector<double> window = internal::HannWindow(config.fft_size);
  const std::size_t bins = fft.bins();

  ParamTrack track;
  track.frame_period_ms = config.frame_period_ms;
  track.sample_rate_hz = sample_rate_hz;
  track.f0.assign(frames, 0.0);
  track.sp = Matrix(frames, bins);
  track.ap = Matrix(frames, bins, 1.0);

  std::vector<double> pitch_frame(pitch_window);
  std::vector<double> spec_frame(config.fft_size);
  std::vector<std::complex<double>> spectrum(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto center = static_cast<std::ptrdiff_t>(std::llround(static_cast<double>(t) * hop));

    CenteredFrame(samples, center, pitch_frame);
    const PitchEstimate pitch = EstimatePitch(
        pitch_frame, std::max<std::size_t>(min_lag, 2), max_lag,
        config.voicing_threshold, rate);
    if (pitch.f0_hz > 0.0) {
      track.f0[t] = std::clamp(pitch.f0_hz, config.f0_floor_hz, config.f0_ceil_hz);
    }
    const double aperiodicity =
        pitch.f0_hz > 0.0 ? std::clamp(1.0 - pitch.confidence, 0.0, 1.0) : 1.0;
    std::ranges::fill(track.ap.row(t), aperiodicity);

    CenteredFrame(samples, center, spec_frame);
    for (std::size_t i = 0; i < spec_frame.size(); ++i) spec_frame[i] *= window[i];
    fft.Forward(spec_frame, spectrum);
    std::span<double> row = track.sp.row(t);
    for (std::size_t k = 0; k < bins; ++k) row[k] = std::norm(spectrum[k]);
    SmoothEnvelope(fft, row, config.cepstral_order);
  }
  return track;
}

std::vector<double> Synthesize(const ParamTrack& track, std::uint64_t seed) {
  ValidateParamTrack(track);
  const std::size_t frames = track.frames();
  const double rate = static_cast<double>(track.sample_rate_hz);
  const double hop = track.frame_period_ms * rate / 1000.0;
  const auto length = static_cast<std::size_t>(std::llround(static_cast<double>(frames) * hop));
  std::vector<double> output(length, 0.0);
  if (frames == 0 || length == 0) return output;

  // Excitation: unit-power pulse train on voiced frames, white noise otherwise.
  internal::Rng rng(seed);
  std::vector<double> excitation(length, 0.0);
  double phase = 1.0;
  for (std::size_t n = 0; n < length; ++n) {
    const std::size_t t = std::min(frames - 1, static_cast<std::size_t>(static_cast<double>(n) / hop));
    const double f0 = track.f0[t];
    if (f0 > 0.0) {
      phase += f0 / rate;
      if (phase >= 1.0) {
        phase -= std::floor(phase);
        excitation[n] = std::sqrt(rate / f0);
      }
    } else {
      phase = 1.0;
      excitation[n] = rng.Normal();
    }
  }

  // The envelope's bin count fixes the FFT size: F = N / 2 + 1.
  const std::size_t bins = track.bins();
  if (bins < 2) return output;
  const std::size_t fft_size = 2 * (bins - 1);
  const internal::RealFft fft(fft_size);
  const std::vector<double> window = internal::HannWindow(fft_size);
  double window_power = 0.0;
  for (double w : window) window_power += w * w;

  std::vector<double> norm(length, 0.0);
  std::vector<double> segment(fft_size);
  std::vector<double> shaped(fft_size);
  std::vector<std::complex<double>> spectrum(fft.bins());
  const auto half = static_cast<std::ptrdiff_t>(fft_size / 2);
  for (std::size_t t = 0; t < frames; ++t) {
    const auto center = static_cast<std::ptrdiff_t>(std::llround(static_cast<double>(t) * hop));
    CenteredFrame(excitation, center, segment);
    for (std::size_t i = 0; i < fft_size; ++i) segment[i] *= window[i];
    fft.Forward(segment, spectrum);
    std::span<const double> env = track.sp.row(t);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      spectrum[k] *= std::sqrt(env[k] / window_power);
    }
    fft.Inverse(spectrum, shaped);
    for (std::size_t i = 0; i < fft_size; ++i) {
      const std::ptrdiff_t idx = center - half + static_cast<std::ptrdiff_t>(i);
      if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(length)) continue;
      const auto u = static_cast<std::size_t>(idx);
      output[u] += window[i] * shaped[i] / static_cast<double>(fft_size);
      norm[u] += window[i] * window[i];
    }
  }
  for (std::size_t n = 0; n < length; ++n) {
    if (norm[n] > 1e-6) output[n] /= norm[n];
  }
  return output;
}

void WriteParamTrack(const ParamTrack& track, const std::filesystem::path& path) {
  ValidateParamTrack(track);
  if (track.frames() > std::numeric_limits<std::uint32_t>::max() ||
      track.bins() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kDimensionMismatch, "track too large for PBPT header");
  }
  internal::ByteWriter w;
  w.Magic({kParamMagic, 4});
  w.U16(kParamVersion);
  w.U32(static_cast<std::uint32_t>(track.frames()));
  w.U32(static_cast<std::uint32_t>(track.bins()));
  w.F64(track.frame_period_ms);
  w.U32(track.sample_rate_hz);
  w.F32Array(track.f0);
  w.F32Array(track.sp.values());
  w.F32Array(track.ap.values());
  internal::WriteFileAtomic(path, w.buffer());
}

ParamTrack ReadParamTrack(const std::filesystem::path& path) {
  internal::ByteReader r(internal::ReadFileBytes(path));
  r.ExpectMagic({kParamMagic, 4});
  const std::uint16_t version = r.U16();
  if (version != kParamVersion) {
    throw Error(ErrorCode::kBadMagic,
                "unsupported PBPT version " + std::to_string(version));
  }
  const std::size_t frames = r.U32();
  const std::size_t bins = r.U32();
  ParamTrack track;
  track.frame_period_ms = r.F64();
  track.sample_rate_hz = r.U32();
  const std::size_t expected = (frames + 2 * frames * bins) * sizeof(float);
  if (r.remaining() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                path.string() + ": header says T=" + std::to_string(frames) +
                    ", F=" + std::to_string(bins) + " but payload has " +
                    std::to_string(r.remaining()) + " bytes");
  }
  track.f0.resize(frames);
  track.sp = Matrix(frames, bins);
  track.ap = Matrix(frames, bins);
  r.F32Array(track.f0);
  r.F32Array(track.sp.values());
  r.F32Array(track.ap.values());
  ValidateParamTrack(track);
  return track;
}

}  // namespace prosodybench
