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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "oracles.h"

namespace prosodybench {
namespace {

using testing::CaughtCode;

std::vector<double> Sine(double hz, double seconds, std::uint32_t sr, double amp = 0.5) {
  std::vector<double> out(static_cast<std::size_t>(seconds * sr));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = amp * std::sin(2.0 * M_PI * hz * static_cast<double>(i) / sr);
  }
  return out;
}

TEST(AnalyzeTest, SilenceGivesUnvoicedFrames) {
  const std::vector<double> silence(16000, 0.0);
  const ParamTrack t = Analyze(silence, 16000, {});
  ASSERT_EQ(t.frames(), 200u);
  EXPECT_EQ(t.bins(), 257u);
  for (double f : t.f0) EXPECT_EQ(f, 0.0);
  ValidateParamTrack(t);
}

TEST(AnalyzeTest, SineAt200HzIsTracked) {
  const ParamTrack t = Analyze(Sine(200.0, 1.0, 16000), 16000, {});
  std::size_t interior = 0, hits = 0;
  for (std::size_t i = 10; i + 10 < t.frames(); ++i) {
    ++interior;
    if (std::fabs(t.f0[i] - 200.0) <= 3.0) ++hits;
  }
  EXPECT_GE(static_cast<double>(hits), 0.9 * static_cast<double>(interior));
}

TEST(AnalyzeTest, FrameCountIsCeilOfDuration) {
  // 1003 samples at 16 kHz = 62.6875 ms -> 13 frames of 5 ms.
  EXPECT_EQ(Analyze(std::vector<double>(1003, 0.0), 16000, {}).frames(), 13u);
  EXPECT_EQ(Analyze(std::vector<double>(800, 0.0), 16000, {}).frames(), 10u);
}

TEST(AnalyzeTest, Errors) {
  EXPECT_EQ(CaughtCode([] { Analyze({}, 16000, {}); }), ErrorCode::kEmptyAudio);
  const std::vector<double> x(100, 0.0);
  EXPECT_EQ(CaughtCode([&] { Analyze(x, 4000, {}); }), ErrorCode::kUnsupportedSampleRate);
}

ParamTrack FlatTrack(std::size_t frames, double f0, double sp_value) {
  ParamTrack t;
  t.f0.assign(frames, f0);
  t.sp = Matrix(frames, 257);
  t.ap = Matrix(frames, 257);
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t f = 0; f < 257; ++f) {
      t.sp(i, f) = sp_value;
      t.ap(i, f) = f0 > 0 ? 0.0 : 1.0;
    }
  }
  return t;
}

TEST(SynthesizeTest, ZeroEnvelopeIsSilent) {
  const std::vector<double> y = Synthesize(FlatTrack(50, 120.0, 0.0));
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(SynthesizeTest, LengthMatchesFrames) {
  const std::vector<double> y = Synthesize(FlatTrack(40, 120.0, 1e-3));
  EXPECT_NEAR(static_cast<double>(y.size()), 40 * 80.0, 80.0);
}

TEST(SynthesizeTest, SameSeedIsBitIdentical) {
  const ParamTrack t = FlatTrack(60, 0.0, 1e-3);
  EXPECT_EQ(Synthesize(t, 7), Synthesize(t, 7));
  EXPECT_NE(Synthesize(t, 7), Synthesize(t, 8));
}

TEST(SynthesizeTest, RoundTripRecovers100Hz) {
  const ParamTrack t = FlatTrack(200, 100.0, 1e-3);
  const ParamTrack back = Analyze(Synthesize(t), 16000, {});
  std::size_t interior = 0, hits = 0;
  for (std::size_t i = 10; i + 10 < back.frames(); ++i) {
    ++interior;
    if (std::fabs(back.f0[i] - 100.0) <= 3.0) ++hits;
  }
  EXPECT_GE(static_cast<double>(hits), 0.9 * static_cast<double>(interior));
}

TEST(SynthesizeTest, RejectsInvalidTrack) {
  ParamTrack t = FlatTrack(5, 100.0, 1.0);
  t.ap(2, 3) = 1.5;
  EXPECT_EQ(CaughtCode([&] { Synthesize(t); }), ErrorCode::kInvariantViolation);
}

TEST(ValidateTest, InvariantViolations) {
  ParamTrack t = FlatTrack(4, 100.0, 1.0);
  ValidateParamTrack(t);
  ParamTrack neg_f0 = t;
  neg_f0.f0[1] = -1.0;
  EXPECT_EQ(CaughtCode([&] { ValidateParamTrack(neg_f0); }), ErrorCode::kInvariantViolation);
  ParamTrack neg_sp = t;
  neg_sp.sp(0, 0) = -1e-9;
  EXPECT_EQ(CaughtCode([&] { ValidateParamTrack(neg_sp); }), ErrorCode::kInvariantViolation);
  ParamTrack short_f0 = t;
  short_f0.f0.pop_back();
  EXPECT_EQ(CaughtCode([&] { ValidateParamTrack(short_f0); }), ErrorCode::kInvariantViolation);
  ParamTrack bad_period = t;
  bad_period.frame_period_ms = 0.0;
  EXPECT_EQ(CaughtCode([&] { ValidateParamTrack(bad_period); }),
            ErrorCode::kInvariantViolation);
}

TEST(SegmentToFramesTest, FloorAndCeil) {
  EXPECT_EQ(SegmentToFrames({0.0, 0.1, "w"}, 5.0), (FrameRange{0, 20}));
  EXPECT_EQ(SegmentToFrames({0.012, 0.0231, "w"}, 5.0), (FrameRange{2, 5}));
  // 0.3 * 1000 / 5 is 59.99999999999999 in floating point; it must map to 60.
  EXPECT_EQ(SegmentToFrames({0.3, 0.35, "w"}, 5.0), (FrameRange{60, 70}));
  EXPECT_EQ(CaughtCode([] { SegmentToFrames({0.2, 0.1, "w"}, 5.0); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CaughtCode([] { SegmentToFrames({0.0, 0.1, "w"}, 0.0); }),
            ErrorCode::kInvalidArgument);
}

// Values drawn from float32 so a f32 file round trip is exact.
ParamTrack F32Track(std::size_t frames, std::size_t bins, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ParamTrack t = testing::RandomTrack(rng, frames, bins);
  for (double& f : t.f0) f = static_cast<float>(f);
  for (double& v : t.sp.values()) v = static_cast<float>(v);
  for (double& v : t.ap.values()) v = static_cast<float>(v);
  t.frame_period_ms = 10.0;
  t.sample_rate_hz = 22050;
  return t;
}

TEST(ParamFileTest, RoundTripIsExact) {
  testing::ScratchDir dir("pbpt");
  const ParamTrack t = F32Track(7, 5, 3);
  WriteParamTrack(t, dir / "a.pbpt");
  EXPECT_EQ(ReadParamTrack(dir / "a.pbpt"), t);
  EXPECT_FALSE(std::filesystem::exists(dir / "a.pbpt.tmp"));
}

TEST(ParamFileTest, ByteLayout) {
  testing::ScratchDir dir("pbpt_layout");
  ParamTrack t;
  t.f0 = {100.0, 0.0};
  t.sp = Matrix(2, 2);
  t.ap = Matrix(2, 2);
  t.sp(0, 0) = 1.0; t.sp(0, 1) = 2.0; t.sp(1, 0) = 3.0; t.sp(1, 1) = 4.0;
  t.ap(0, 0) = 0.5; t.ap(0, 1) = 0.25; t.ap(1, 0) = 1.0; t.ap(1, 1) = 0.0;
  t.frame_period_ms = 5.0;
  t.sample_rate_hz = 16000;
  testing::LeBytes expected;
  expected.Raw("PBPT").Put<std::uint16_t>(1).Put<std::uint32_t>(2).Put<std::uint32_t>(2)
      .Put<double>(5.0).Put<std::uint32_t>(16000);
  for (float v : {100.0f, 0.0f, 1.0f, 2.0f, 3.0f, 4.0f, 0.5f, 0.25f, 1.0f, 0.0f}) {
    expected.Put<float>(v);
  }
  WriteParamTrack(t, dir / "b.pbpt");
  std::ifstream in(dir / "b.pbpt", std::ios::binary);
  const std::vector<std::uint8_t> actual((std::istreambuf_iterator<char>(in)), {});
  EXPECT_EQ(actual, expected.bytes);
}

TEST(ParamFileTest, CorruptFiles) {
  testing::ScratchDir dir("pbpt_bad");
  WriteParamTrack(F32Track(3, 4, 1), dir / "ok.pbpt");
  std::ifstream in(dir / "ok.pbpt", std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), {});

  auto write = [&](const std::string& name, const std::vector<char>& b) {
    std::ofstream(dir / name, std::ios::binary).write(b.data(), static_cast<long>(b.size()));
    return dir / name;
  };
  std::vector<char> magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(CaughtCode([&] { ReadParamTrack(write("magic.pbpt", magic)); }),
            ErrorCode::kBadMagic);
  std::vector<char> truncated(bytes.begin(), bytes.end() - 4);
  EXPECT_EQ(CaughtCode([&] { ReadParamTrack(write("short.pbpt", truncated)); }),
            ErrorCode::kDimensionMismatch);
  std::vector<char> padded = bytes;
  padded.push_back(0);
  EXPECT_EQ(CaughtCode([&] { ReadParamTrack(write("long.pbpt", padded)); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(CaughtCode([&] { ReadParamTrack(dir / "missing.pbpt"); }), ErrorCode::kIoFailure);
}

}  // namespace
}  // namespace prosodybench
