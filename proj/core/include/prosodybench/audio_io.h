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

#ifndef PROSODYBENCH_AUDIO_IO_H_
#define PROSODYBENCH_AUDIO_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace prosodybench {

struct Audio {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  std::uint32_t sample_rate_hz = 16000;
};

// RIFF/WAVE with 16-bit PCM or 32-bit float payload. Multi-channel input is
// downmixed by averaging.
Audio ReadWav(const std::filesystem::path& path);

// Writes 32-bit float mono, unclipped, so resynthesized level changes survive.
void WriteWav(const Audio& audio, const std::filesystem::path& path);

}  // namespace prosodybench

#endif  // PROSODYBENCH_AUDIO_IO_H_
