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

#ifndef PROSODYBENCH_MANIFEST_H_
#define PROSODYBENCH_MANIFEST_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prosodybench/vocoder_params.h"

namespace prosodybench {

// One utterance of a JSON Lines manifest. Segment times are in seconds and
// each tier is time-ordered and non-overlapping.
struct UtteranceManifest {
  std::string utterance_id;
  std::string speaker_id;
  std::string sentence_id;
  std::optional<std::string> accent_tag;
  // A .pbpt parameter file or a .wav file. Relative paths in a manifest file
  // are resolved against the manifest's directory.
  std::filesystem::path audio_or_param_path;
  std::vector<Segment> word_segments;
  std::vector<Segment> phone_segments;

  friend bool operator==(const UtteranceManifest&, const UtteranceManifest&) = default;
};

// Throws kManifestBroken on malformed lines, unordered or overlapping
// segments, duplicate utterance ids, or (when check_paths) missing files.
std::vector<UtteranceManifest> ReadManifest(const std::filesystem::path& path,
                                            bool check_paths = true);

// Paths under the manifest's directory are written relative to it.
void WriteManifest(std::span<const UtteranceManifest> utterances,
                   const std::filesystem::path& path);

// Loads the utterance's ParamTrack, running Analyze() for .wav inputs.
ParamTrack LoadUtteranceTrack(const UtteranceManifest& utterance,
                              const AnalysisConfig& analysis = {});

}  // namespace prosodybench

#endif  // PROSODYBENCH_MANIFEST_H_
