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

#include <algorithm>
#include <string>

#include "binary_io.h"
#include "prosodybench/error.h"

namespace prosodybench {
namespace {

[[noreturn]] void Malformed(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::kIoFailure, path.string() + ": " + what);
}

}  // namespace

Audio ReadWav(const std::filesystem::path& path) {
  internal::ByteReader r(internal::ReadFileBytes(path));
  try {
    r.ExpectMagic("RIFF");
    r.U32();
    r.ExpectMagic("WAVE");
  } catch (const Error&) {
    Malformed(path, "not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_format = false;
  while (r.remaining() >= 8) {
    const std::string id = r.Bytes(4);
    const std::uint32_t size = r.U32();
    if (id == "fmt ") {
      format = r.U16();
      channels = r.U16();
      rate = r.U32();
      r.U32();  // byte rate
      r.U16();  // block align
      bits = r.U16();
      r.Bytes(size - 16);
      have_format = true;
    } else if (id == "data") {
      if (!have_format || channels == 0) Malformed(path, "data chunk before fmt");
      const bool pcm16 = format == 1 && bits == 16;
      const bool float32 = format == 3 && bits == 32;
      if (!pcm16 && !float32) Malformed(path, "only PCM16 and float32 are supported");
      const std::size_t frame_bytes = channels * (bits / 8u);
      const std::size_t count = std::min<std::size_t>(size, r.remaining()) / frame_bytes;
      Audio audio;
      audio.sample_rate_hz = rate;
      audio.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        double sum = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
          sum += pcm16 ? static_cast<std::int16_t>(r.U16()) / 32768.0
                       : static_cast<double>(r.F32());
        }
        audio.samples[i] = sum / channels;
      }
      return audio;
    } else {
      r.Bytes(size + (size & 1u));
    }
  }
  Malformed(path, "no data chunk");
}

void WriteWav(const Audio& audio, const std::filesystem::path& path) {
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 4);
  internal::ByteWriter w;
  w.Magic("RIFF");
  w.U32(36 + data_bytes);
  w.Magic("WAVE");
  w.Magic("fmt ");
  w.U32(16);
  w.U16(3);
  w.U16(1);
  w.U32(audio.sample_rate_hz);
  w.U32(audio.sample_rate_hz * 4);
  w.U16(4);
  w.U16(32);
  w.Magic("data");
  w.U32(data_bytes);
  w.F32Array(audio.samples);
  internal::WriteFileAtomic(path, w.buffer());
}

}  // namespace prosodybench
