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

#include "prosodybench/manifest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "binary_io.h"
#include "json.hpp"
#include "prosodybench/audio_io.h"
#include "prosodybench/error.h"

namespace prosodybench {
namespace {

using nlohmann::json;

[[noreturn]] void Broken(const std::filesystem::path& path, std::size_t line,
                         const std::string& what) {
  throw Error(ErrorCode::kManifestBroken,
              path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<Segment> ParseTier(const json& j, const char* key) {
  std::vector<Segment> tier;
  if (!j.contains(key)) return tier;
  for (const json& s : j.at(key)) {
    tier.push_back({s.at("start_s").get<double>(), s.at("end_s").get<double>(),
                    s.at("label").get<std::string>()});
  }
  return tier;
}

json TierToJson(std::span<const Segment> tier) {
  json out = json::array();
  for (const Segment& s : tier) {
    out.push_back({{"start_s", s.start_s}, {"end_s", s.end_s}, {"label", s.label}});
  }
  return out;
}

// Returns an error message, or an empty string when the tier is valid.
std::string CheckTier(std::span<const Segment> tier, const char* name) {
  for (std::size_t i = 0; i < tier.size(); ++i) {
    const Segment& s = tier[i];
    if (!(s.start_s >= 0.0) || !(s.end_s > s.start_s)) {
      return std::string(name) + " segment " + std::to_string(i) +
             " must satisfy 0 <= start_s < end_s";
    }
    if (i > 0 && s.start_s < tier[i - 1].end_s) {
      return std::string(name) + " segments " + std::to_string(i - 1) + " and " +
             std::to_string(i) + " overlap or are out of order";
    }
  }
  return {};
}

}  // namespace

std::vector<UtteranceManifest> ReadManifest(const std::filesystem::path& path,
                                            bool check_paths) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open manifest " + path.string());
  const std::filesystem::path base = path.parent_path();

  std::vector<UtteranceManifest> out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    UtteranceManifest u;
    try {
      const json j = json::parse(line);
      u.utterance_id = j.at("utterance_id").get<std::string>();
      u.speaker_id = j.at("speaker_id").get<std::string>();
      u.sentence_id = j.at("sentence_id").get<std::string>();
      if (j.contains("accent_tag") && !j.at("accent_tag").is_null()) {
        u.accent_tag = j.at("accent_tag").get<std::string>();
      }
      u.audio_or_param_path = j.at("audio_or_param_path").get<std::string>();
      u.word_segments = ParseTier(j, "word_segments");
      u.phone_segments = ParseTier(j, "phone_segments");
    } catch (const json::exception& e) {
      Broken(path, line_no, e.what());
    }
    if (u.audio_or_param_path.is_relative()) {
      u.audio_or_param_path = base / u.audio_or_param_path;
    }
    for (auto [tier, name] : {std::pair{&u.word_segments, "word"},
                              std::pair{&u.phone_segments, "phone"}}) {
      if (std::string err = CheckTier(*tier, name); !err.empty()) {
        Broken(path, line_no, err);
      }
    }
    if (!seen.insert(u.utterance_id).second) {
      Broken(path, line_no, "duplicate utterance_id '" + u.utterance_id + "'");
    }
    if (check_paths && !std::filesystem::exists(u.audio_or_param_path)) {
      Broken(path, line_no, "missing file " + u.audio_or_param_path.string());
    }
    out.push_back(std::move(u));
  }
  return out;
}

void WriteManifest(std::span<const UtteranceManifest> utterances,
                   const std::filesystem::path& path) {
  const std::filesystem::path base =
      std::filesystem::absolute(path).lexically_normal().parent_path();
  std::ostringstream out;
  for (const UtteranceManifest& u : utterances) {
    std::filesystem::path file = u.audio_or_param_path;
    if (!file.empty()) {
      const std::filesystem::path rel =
          std::filesystem::absolute(file).lexically_normal().lexically_relative(base);
      if (!rel.empty() && *rel.begin() != "..") file = rel;
    }
    json j = {{"utterance_id", u.utterance_id},
              {"speaker_id", u.speaker_id},
              {"sentence_id", u.sentence_id},
              {"accent_tag", u.accent_tag ? json(*u.accent_tag) : json(nullptr)},
              {"audio_or_param_path", file.generic_string()},
              {"word_segments", TierToJson(u.word_segments)},
              {"phone_segments", TierToJson(u.phone_segments)}};
    out << j.dump() << '\n';
  }
  internal::WriteFileAtomic(path, out.str());
}

ParamTrack LoadUtteranceTrack(const UtteranceManifest& utterance,
                              const AnalysisConfig& analysis) {
  const std::filesystem::path& file = utterance.audio_or_param_path;
  if (file.extension() == ".wav") {
    const Audio audio = ReadWav(file);
    return Analyze(audio.samples, audio.sample_rate_hz, analysis);
  }
  return ReadParamTrack(file);
}

}  // namespace prosodybench
