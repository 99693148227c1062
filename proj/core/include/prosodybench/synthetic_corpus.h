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

#ifndef PROSODYBENCH_SYNTHETIC_CORPUS_H_
#define PROSODYBENCH_SYNTHETIC_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "prosodybench/manifest.h"
#include "prosodybench/vocoder_params.h"

namespace prosodybench {

// Shape of a desk-scale corpus in which every speaker reads every sentence.
struct CorpusSpec {
  std::size_t speakers = 4;
  std::size_t sentences = 4;
  std::size_t phones_per_sentence = 9;
  std::size_t phones_per_word = 3;
  std::size_t accents = 2;

  // Speaker s gets base_f0_hz + s * f0_offset_step_hz and a formant scale
  // of 1 + (s - (speakers - 1) / 2) * formant_scale_step.
  double base_f0_hz = 120.0;
  double f0_offset_step_hz = 15.0;
  double formant_scale_step = 0.04;
  // Per-speaker relative phone duration perturbation, uniform in +/- this.
  double duration_jitter = 0.15;

  double phone_duration_ms = 90.0;
  double silence_ms = 60.0;
  std::uint32_t sample_rate_hz = 16000;
  double frame_period_ms = 5.0;
  std::size_t fft_size = 512;
};

struct SyntheticUtterance {
  UtteranceManifest manifest;
  ParamTrack track;
};

// Builds tracks from per-phone formant templates with speaker formant
// scaling and f0 offsets over a sentence-level f0 contour. The phone tier
// tiles each utterance, bracketed by "sil" phones; words group consecutive
// non-silence phones. Every value is float32-representable so the tracks
// survive a parameter-file round trip unchanged. Throws kSpecTooSmall for
// fewer than 2 speakers, 2 sentences or 3 phones per sentence.
std::vector<SyntheticUtterance> GenerateSyntheticCorpus(const CorpusSpec& spec,
                                                        std::uint64_t seed);

// Writes params/<utterance_id>.pbpt and manifest.jsonl under out_dir and
// returns the manifest entries.
std::vector<UtteranceManifest> WriteSyntheticCorpus(const CorpusSpec& spec,
                                                    std::uint64_t seed,
                                                    const std::filesystem::path& out_dir);

}  // namespace prosodybench

#endif  // PROSODYBENCH_SYNTHETIC_CORPUS_H_
