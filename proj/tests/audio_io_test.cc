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

#include "prosodybench/audio_io.h"

#include <gtest/gtest.h>

#include <fstream>

#include "oracles.h"

namespace prosodybench {
namespace {

TEST(WavTest, FloatRoundTripIsExactForFloatValues) {
  testing::ScratchDir dir("wav");
  Audio a{{0.0, 0.5, -0.25, 1.5, -2.0}, 22050};
  WriteWav(a, dir / "a.wav");
  const Audio back = ReadWav(dir / "a.wav");
  EXPECT_EQ(back.sample_rate_hz, 22050u);
  EXPECT_EQ(back.samples, a.samples);
}

TEST(WavTest, ReadsPcm16Stereo) {
  testing::ScratchDir dir("wav16");
  const std::int16_t frames[][2] = {{16384, 16384}, {-32768, 0}, {0, 32767}};
  testing::LeBytes b;
  const std::uint32_t data_bytes = sizeof(frames);
  b.Raw("RIFF").Put<std::uint32_t>(36 + data_bytes).Raw("WAVE");
  b.Raw("fmt ").Put<std::uint32_t>(16).Put<std::uint16_t>(1).Put<std::uint16_t>(2)
      .Put<std::uint32_t>(8000).Put<std::uint32_t>(8000 * 4).Put<std::uint16_t>(4)
      .Put<std::uint16_t>(16);
  b.Raw("data").Put<std::uint32_t>(data_bytes);
  for (const auto& f : frames) b.Put<std::int16_t>(f[0]).Put<std::int16_t>(f[1]);
  std::ofstream(dir / "s.wav", std::ios::binary)
      .write(reinterpret_cast<const char*>(b.bytes.data()), static_cast<long>(b.bytes.size()));

  const Audio a = ReadWav(dir / "s.wav");
  EXPECT_EQ(a.sample_rate_hz, 8000u);
  ASSERT_EQ(a.samples.size(), 3u);
  EXPECT_DOUBLE_EQ(a.samples[0], 0.5);
  EXPECT_DOUBLE_EQ(a.samples[1], -0.5);
  EXPECT_DOUBLE_EQ(a.samples[2], 32767.0 / 65536.0);
}

TEST(WavTest, RejectsGarbage) {
  testing::ScratchDir dir("wavbad");
  std::ofstream(dir / "x.wav") << "not a wav file at all";
  EXPECT_EQ(testing::CaughtCode([&] { ReadWav(dir / "x.wav"); }), ErrorCode::kIoFailure);
  EXPECT_EQ(testing::CaughtCode([&] { ReadWav(dir / "none.wav"); }), ErrorCode::kIoFailure);
}

}  // namespace
}  // namespace prosodybench
