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

#include "prosodybench/experiment.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "json.hpp"
#include "parallel.h"
#include "prosodybench/error.h"
#include "prosodybench/prosody_mod.h"

namespace prosodybench {
namespace {

using nlohmann::json;

constexpr std::pair<ExperimentKind, std::string_view> kKindNames[] = {
    {ExperimentKind::kWordPitch, "word_pitch"},
    {ExperimentKind::kWordIntensity, "word_intensity"},
    {ExperimentKind::kUttPitch, "utt_pitch"},
    {ExperimentKind::kUttIntensity, "utt_intensity"},
    {ExperimentKind::kSpeakerWarp, "speaker_warp"},
    {ExperimentKind::kRealSpeakerPairs, "real_speaker_pairs"},
    {ExperimentKind::kPnmi, "pnmi"},
    {ExperimentKind::kClusterHist, "cluster_hist"},
    {ExperimentKind::kMaSweep, "ma_sweep"},
};

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kConfigInvalid, what);
}

bool IsWordKind(ExperimentKind kind) {
  return kind == ExperimentKind::kWordPitch || kind == ExperimentKind::kWordIntensity;
}

bool IsScaledKind(ExperimentKind kind) {
  return IsWordKind(kind) || kind == ExperimentKind::kUttPitch ||
         kind == ExperimentKind::kUttIntensity || kind == ExperimentKind::kSpeakerWarp;
}

ExperimentKind EffectiveKind(const ExperimentConfig& config) {
  return config.kind == ExperimentKind::kMaSweep ? config.sweep_kind : config.kind;
}

std::string FormatScale(double scale) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), scale);
  return std::string(buf, end);
}

void RejectUnknownKeys(const json& section, std::initializer_list<std::string_view> known,
                       const std::string& where) {
  for (const auto& [key, value] : section.items()) {
    if (std::ranges::find(known, key) == known.end()) {
      Invalid("unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void ReadIf(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

FeatureSource ParseFeatureSource(const std::string& text,
                                 const std::filesystem::path& base_dir) {
  if (text == "native_logmel") return FeatureSource{};
  constexpr std::string_view kExternal = "external:";
  if (text.starts_with(kExternal)) {
    std::filesystem::path pattern = text.substr(kExternal.size());
    if (pattern.empty()) Invalid("external feature source needs a path pattern");
    if (pattern.is_relative()) pattern = base_dir / pattern;
    return FeatureSource{false, pattern.string()};
  }
  Invalid("feature_source must be 'native_logmel' or 'external:<pattern>', got '" +
          text + "'");
}

std::string ReplaceAll(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
  return s;
}

// Produces feature matrices for one (source, window) combination.
class FeatureFactory {
 public:
  FeatureFactory(const ExperimentConfig& config, const FeatureSource& source,
                 std::size_t window)
      : config_(config), source_(source), window_(window) {}

  // `make_track` is only invoked for native sources.
  FeatureMatrix Make(const std::string& utterance_id, const std::string& condition,
                     const std::function<ParamTrack()>& make_track) const {
    FeatureMatrix raw;
    if (source_.native) {
      ParamTrack track = make_track();
      if (config_.resynthesize) {
        const std::vector<double> audio = Synthesize(track, config_.synthesis_seed);
        AnalysisConfig analysis = config_.analysis;
        analysis.frame_period_ms = track.frame_period_ms;
        track = Analyze(audio, track.sample_rate_hz, analysis);
      }
      raw = ExtractLogMel(track, config_.n_mels, config_.use_f0_channel);
    } else {
      std::string path = ReplaceAll(source_.pattern, "{utt}", utterance_id);
      path = ReplaceAll(std::move(path), "{cond}", condition);
      raw = ReadFeatures(path);
    }
    return PostProcess(std::move(raw));
  }

  std::string Tag(const FeatureMatrix& sample) const {
    return source_.native ? sample.source_tag
                          : (sample.source_tag.empty() ? source_.pattern : sample.source_tag);
  }

 private:
  FeatureMatrix PostProcess(FeatureMatrix f) const {
    const bool normalize = config_.normalization == Normalization::kPerUtterance;
    if (config_.smoothing_order == SmoothingOrder::kMaFirst) {
      f = MovingAverage(f, window_);
      if (normalize) f = NormalizePerUtterance(f);
    } else {
      if (normalize) f = NormalizePerUtterance(f);
      f = MovingAverage(f, window_);
    }
    return f;
  }

  const ExperimentConfig& config_;
  const FeatureSource& source_;
  std::size_t window_;
};

ParamTrack ApplyModification(ExperimentKind kind, const ParamTrack& track, double scale,
                             std::optional<FrameRange> frames) {
  const FrameRange all{0, track.frames()};
  switch (kind) {
    case ExperimentKind::kWordPitch:
      return ModifyWordPitch(track, frames.value_or(all), scale);
    case ExperimentKind::kWordIntensity:
      return ModifyWordIntensity(track, frames.value_or(all), scale);
    case ExperimentKind::kUttPitch:
      return ModifyUtterancePitchRange(track, scale);
    case ExperimentKind::kUttIntensity:
      return ModifyUtteranceIntensityRange(track, scale);
    case ExperimentKind::kSpeakerWarp:
      return WarpSpeaker(track, scale);
    default:
      Invalid("kind '" + std::string(ExperimentKindName(kind)) + "' has no modification");
  }
}

// Word spans in track frames, clipped to the track; empty spans dropped.
std::vector<std::pair<std::size_t, FrameRange>> WordFrames(const UtteranceManifest& utt,
                                                           const ParamTrack& track) {
  std::vector<std::pair<std::size_t, FrameRange>> out;
  for (std::size_t w = 0; w < utt.word_segments.size(); ++w) {
    FrameRange r = SegmentToFrames(utt.word_segments[w], track.frame_period_ms);
    r.end = std::min(r.end, track.frames());
    if (r.start < r.end) out.emplace_back(w, r);
  }
  return out;
}

struct TrainedModel {
  std::size_t k;
  KMeansModel model;
};

std::vector<TokenSequence> TokenizeAll(std::span<const TrainedModel> models,
                                       const FeatureMatrix& features,
                                       const std::string& utterance_id) {
  std::vector<TokenSequence> out;
  out.reserve(models.size());
  for (const TrainedModel& m : models) {
    out.push_back(KMeansAssign(m.model, features, utterance_id));
  }
  return out;
}

struct RunContext {
  const ExperimentConfig& config;
  std::string kind_name;
  ExperimentKind kind;
  const FeatureFactory& factory;
  std::string source_tag;
  std::size_t window;
  std::span<const TrainedModel> models;
};

RawRecord MakeRecord(const RunContext& ctx, const std::string& utterance_id,
                     std::string condition, std::size_t k, std::optional<double> scale,
                     std::string metric, double value, std::size_t n_items = 1) {
  return RawRecord{ctx.kind_name, utterance_id,  std::move(condition), k,
                   ctx.source_tag, ctx.window,   scale,                std::move(metric),
                   value,         n_items};
}

// Records for one utterance under a scaled kind.
std::vector<RawRecord> EvaluateScaled(const RunContext& ctx, const UtteranceManifest& utt,
                                      const std::optional<ParamTrack>& track) {
  const std::string& id = utt.utterance_id;
  const std::vector<TokenSequence> orig =
      TokenizeAll(ctx.models, ctx.factory.Make(id, "orig", [&] { return *track; }), id);

  std::vector<RawRecord> records;
  for (double scale : ctx.config.scale_grid) {
    if (IsWordKind(ctx.kind)) {
      const std::string global_cond = ConditionName(ctx.kind, scale, std::nullopt, true);
      const std::vector<TokenSequence> global = TokenizeAll(
          ctx.models,
          ctx.factory.Make(id, global_cond,
                           [&] { return ApplyModification(ctx.kind, *track, scale, std::nullopt); }),
          id);
      // Word spans come from the manifest in seconds; the ParamTrack frame
      // grid only matters when modifying natively.
      std::vector<std::pair<std::size_t, std::optional<FrameRange>>> words;
      if (track) {
        for (auto& [w, r] : WordFrames(utt, *track)) words.emplace_back(w, r);
      } else {
        for (std::size_t w = 0; w < utt.word_segments.size(); ++w) words.emplace_back(w, std::nullopt);
      }
      if (words.empty()) continue;
      std::vector<double> local_sum(ctx.models.size(), 0.0);
      std::vector<double> global_sum(ctx.models.size(), 0.0);
      for (const auto& [w, frames] : words) {
        const std::vector<TokenSequence> modified = TokenizeAll(
            ctx.models,
            ctx.factory.Make(id, ConditionName(ctx.kind, scale, w),
                             [&] { return ApplyModification(ctx.kind, *track, scale, frames); }),
            id);
        const Segment& seg = utt.word_segments[w];
        for (std::size_t m = 0; m < ctx.models.size(); ++m) {
          local_sum[m] += SegmentTokenErrorRate(orig[m], modified[m], seg);
          global_sum[m] += SegmentTokenErrorRate(orig[m], global[m], seg);
        }
      }
      const auto n_words = static_cast<double>(words.size());
      const std::string cond = ConditionName(ctx.kind, scale);
      for (std::size_t m = 0; m < ctx.models.size(); ++m) {
        records.push_back(MakeRecord(ctx, id, cond, ctx.models[m].k, scale, "segment_ter",
                                     local_sum[m] / n_words));
        records.push_back(MakeRecord(ctx, id, cond, ctx.models[m].k, scale,
                                     "segment_ter_global", global_sum[m] / n_words));
      }
    } else {
      const std::string cond = ConditionName(ctx.kind, scale);
      const std::vector<TokenSequence> modified = TokenizeAll(
          ctx.models,
          ctx.factory.Make(id, cond,
                           [&] { return ApplyModification(ctx.kind, *track, scale, std::nullopt); }),
          id);
      for (std::size_t m = 0; m < ctx.models.size(); ++m) {
        records.push_back(MakeRecord(ctx, id, cond, ctx.models[m].k, scale, "ter",
                                     TokenErrorRate(orig[m], modified[m])));
      }
    }
  }
  return records;
}

Error WithUtterance(const Error& e, const std::string& utterance_id) {
  return Error(e.code(), "utterance '" + utterance_id + "': " + e.what());
}

std::vector<TrainedModel> TrainModels(const ExperimentConfig& config,
                                      const FeatureFactory& factory,
                                      std::span<const UtteranceManifest> train,
                                      std::string* tag) {
  std::vector<FeatureMatrix> features(train.size());
  internal::ParallelFor(train.size(), config.num_threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        features[i] = factory.Make(train[i].utterance_id, "orig", [&] {
          return LoadUtteranceTrack(train[i], config.analysis);
        });
      } catch (const Error& err) {
        throw WithUtterance(err, train[i].utterance_id);
      }
    }
  });
  *tag = features.empty() ? std::string() : factory.Tag(features.front());
  const Matrix pool = BuildTrainingPool(features, config.train_frame_cap);
  KMeansOptions options = config.kmeans;
  options.num_threads = config.num_threads;
  std::vector<TrainedModel> models;
  for (std::size_t k : config.cluster_sizes) {
    models.push_back({k, KMeansTrain(pool, k, config.seed, options, *tag)});
  }
  return models;
}

using GroupKey = std::tuple<std::string, std::string, std::size_t, std::string, std::size_t,
                            std::optional<double>>;

GroupKey KeyOf(const RawRecord& r) {
  return {r.kind, r.condition_id, r.k, r.source_tag, r.window, r.scale};
}

}  // namespace

std::string_view ExperimentKindName(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ExperimentKind ParseExperimentKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  Invalid("unknown experiment kind '" + std::string(name) + "'");
}

std::string FeatureSource::Describe() const {
  return native ? "native_logmel" : "external:" + pattern;
}

std::vector<double> DefaultScaleGrid(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kWordPitch:
    case ExperimentKind::kUttPitch:
      return {1.0, 1.05, 1.15, 1.3};
    case ExperimentKind::kWordIntensity:
    case ExperimentKind::kUttIntensity:
      return {1.0, 1.5, 2.2, 3.0};
    case ExperimentKind::kSpeakerWarp:
      return {1.0, 1.05, 1.1, 1.2};
    default:
      return {};
  }
}

ExperimentConfig ParseExperimentConfig(std::string_view text,
                                       const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) Invalid("config must be a JSON object");
    RejectUnknownKeys(j,
                      {"experiment_kind", "sweep_kind", "scale_grid", "cluster_sizes",
                       "ma_windows", "feature_source", "kmeans_train_manifest",
                       "eval_manifest", "seed", "normalization", "smoothing_order",
                       "dedup_for_mter", "same_accent_subsets", "native", "analysis",
                       "kmeans", "runtime"},
                      "config");
    if (!j.contains("experiment_kind")) Invalid("missing experiment_kind");
    c.kind = ParseExperimentKind(j.at("experiment_kind").get<std::string>());
    if (j.contains("sweep_kind")) {
      c.sweep_kind = ParseExperimentKind(j.at("sweep_kind").get<std::string>());
    }
    if (j.contains("scale_grid")) {
      c.scale_grid = j.at("scale_grid").get<std::vector<double>>();
    } else {
      c.scale_grid = DefaultScaleGrid(EffectiveKind(c));
    }
    ReadIf(j, "cluster_sizes", c.cluster_sizes);
    if (c.kind == ExperimentKind::kMaSweep) c.ma_windows = {1, 3, 5, 7, 9, 11, 13};
    ReadIf(j, "ma_windows", c.ma_windows);
    if (j.contains("feature_source")) {
      c.feature_sources.clear();
      const json& fs = j.at("feature_source");
      if (fs.is_array()) {
        for (const json& s : fs) c.feature_sources.push_back(ParseFeatureSource(s.get<std::string>(), base_dir));
      } else {
        c.feature_sources.push_back(ParseFeatureSource(fs.get<std::string>(), base_dir));
      }
    }
    auto path_of = [&](const char* key) -> std::filesystem::path {
      if (!j.contains(key)) Invalid(std::string("missing ") + key);
      std::filesystem::path p = j.at(key).get<std::string>();
      return p.is_relative() ? base_dir / p : p;
    };
    c.eval_manifest = path_of("eval_manifest");
    c.kmeans_train_manifest =
        j.contains("kmeans_train_manifest") ? path_of("kmeans_train_manifest") : c.eval_manifest;
    ReadIf(j, "seed", c.seed);
    if (j.contains("normalization")) {
      const std::string n = j.at("normalization").get<std::string>();
      if (n == "none") c.normalization = Normalization::kNone;
      else if (n == "per_utterance") c.normalization = Normalization::kPerUtterance;
      else Invalid("normalization must be 'none' or 'per_utterance'");
    }
    if (j.contains("smoothing_order")) {
      const std::string o = j.at("smoothing_order").get<std::string>();
      if (o == "ma_last") c.smoothing_order = SmoothingOrder::kMaLast;
      else if (o == "ma_first") c.smoothing_order = SmoothingOrder::kMaFirst;
      else Invalid("smoothing_order must be 'ma_last' or 'ma_first'");
    }
    ReadIf(j, "dedup_for_mter", c.dedup_for_mter);
    ReadIf(j, "same_accent_subsets", c.same_accent_subsets);
    if (j.contains("native")) {
      const json& n = j.at("native");
      RejectUnknownKeys(n, {"n_mels", "use_f0_channel", "resynthesize", "synthesis_seed"},
                        "native");
      ReadIf(n, "n_mels", c.n_mels);
      ReadIf(n, "use_f0_channel", c.use_f0_channel);
      ReadIf(n, "resynthesize", c.resynthesize);
      ReadIf(n, "synthesis_seed", c.synthesis_seed);
    }
    if (j.contains("analysis")) {
      const json& a = j.at("analysis");
      RejectUnknownKeys(a, {"frame_period_ms", "fft_size", "cepstral_order", "f0_floor_hz",
                            "f0_ceil_hz", "voicing_threshold"},
                        "analysis");
      ReadIf(a, "frame_period_ms", c.analysis.frame_period_ms);
      ReadIf(a, "fft_size", c.analysis.fft_size);
      ReadIf(a, "cepstral_order", c.analysis.cepstral_order);
      ReadIf(a, "f0_floor_hz", c.analysis.f0_floor_hz);
      ReadIf(a, "f0_ceil_hz", c.analysis.f0_ceil_hz);
      ReadIf(a, "voicing_threshold", c.analysis.voicing_threshold);
    }
    if (j.contains("kmeans")) {
      const json& k = j.at("kmeans");
      RejectUnknownKeys(k, {"max_iters", "tol", "restarts", "train_frame_cap"}, "kmeans");
      ReadIf(k, "max_iters", c.kmeans.max_iters);
      ReadIf(k, "tol", c.kmeans.tol);
      ReadIf(k, "restarts", c.kmeans.restarts);
      ReadIf(k, "train_frame_cap", c.train_frame_cap);
    }
    if (j.contains("runtime")) {
      const json& r = j.at("runtime");
      RejectUnknownKeys(r, {"num_threads"}, "runtime");
      ReadIf(r, "num_threads", c.num_threads);
    }
  } catch (const json::exception& e) {
    Invalid(std::string("malformed config: ") + e.what());
  }
  ValidateExperimentConfig(c);
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseExperimentConfig(buf.str(), path.parent_path());
}

void ValidateExperimentConfig(const ExperimentConfig& c) {
  const ExperimentKind kind = EffectiveKind(c);
  if (c.kind == ExperimentKind::kMaSweep && c.sweep_kind == ExperimentKind::kMaSweep) {
    Invalid("sweep_kind cannot be ma_sweep");
  }
  if (IsScaledKind(kind)) {
    if (c.scale_grid.empty()) Invalid("scale_grid must not be empty");
    for (double s : c.scale_grid) {
      if (!(s > 0.0) || !std::isfinite(s)) Invalid("scale_grid values must be positive");
    }
  }
  if (c.cluster_sizes.empty()) Invalid("cluster_sizes must not be empty");
  for (std::size_t k : c.cluster_sizes) {
    if (k == 0) Invalid("cluster sizes must be positive");
  }
  if (c.ma_windows.empty()) Invalid("ma_windows must not be empty");
  for (std::size_t w : c.ma_windows) {
    if (w % 2 == 0) Invalid("ma_windows must be odd, got " + std::to_string(w));
  }
  if (c.feature_sources.empty()) Invalid("feature_source must not be empty");
  if (c.eval_manifest.empty()) Invalid("eval_manifest is required");
  if (c.n_mels < 8) Invalid("native.n_mels must be at least 8");
  if (c.train_frame_cap == 0) Invalid("kmeans.train_frame_cap must be positive");
  if (c.num_threads == 0) Invalid("runtime.num_threads must be positive");
}

std::string ConditionName(ExperimentKind kind, double scale, std::optional<std::size_t> word,
                          bool global_control) {
  std::string name = std::string(ExperimentKindName(kind)) + "_s" + FormatScale(scale);
  if (global_control) return name + "_global";
  if (word) name += "_w" + std::to_string(*word);
  return name;
}

std::vector<ReportEntry> AggregateRecords(std::span<const RawRecord> records) {
  struct MetricAcc {
    double sum = 0.0;
    std::size_t count = 0;
    std::optional<std::pair<double, std::size_t>> pooled;
  };
  std::map<GroupKey, std::size_t> index;
  std::vector<std::pair<ReportEntry, std::map<std::string, MetricAcc>>> groups;
  for (const RawRecord& r : records) {
    auto [it, inserted] = index.try_emplace(KeyOf(r), groups.size());
    if (inserted) {
      ReportEntry e;
      e.kind = r.kind;
      e.k = r.k;
      e.source_tag = r.source_tag;
      e.window = r.window;
      e.scale = r.scale;
      e.report.condition_id = r.condition_id;
      groups.emplace_back(std::move(e), std::map<std::string, MetricAcc>{});
    }
    MetricAcc& acc = groups[it->second].second[r.metric];
    if (r.utterance_id == kPooledUtterance) {
      acc.pooled = {r.value, r.n_items};
    } else {
      acc.sum += r.value;
      acc.count += r.n_items;
    }
  }
  std::vector<ReportEntry> out;
  out.reserve(groups.size());
  for (auto& [entry, metrics] : groups) {
    for (const auto& [name, acc] : metrics) {
      const double value =
          acc.pooled ? acc.pooled->first : acc.sum / static_cast<double>(acc.count);
      const std::size_t n = acc.pooled ? acc.pooled->second : acc.count;
      entry.report.values[name] = value;
      entry.report.n_items = std::max(entry.report.n_items, n);
      entry.metric_items[name] = n;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

ExperimentResult RunExperiment(const ExperimentConfig& config) {
  ValidateExperimentConfig(config);
  const ExperimentKind kind = EffectiveKind(config);
  const std::string kind_name(ExperimentKindName(config.kind));

  const std::vector<UtteranceManifest> eval = ReadManifest(config.eval_manifest);
  const std::vector<UtteranceManifest> train =
      config.kmeans_train_manifest == config.eval_manifest
          ? eval
          : ReadManifest(config.kmeans_train_manifest);
  if (eval.empty()) throw Error(ErrorCode::kManifestBroken, "eval manifest is empty");
  if (train.empty()) throw Error(ErrorCode::kManifestBroken, "k-means manifest is empty");

  const bool any_native = std::ranges::any_of(config.feature_sources, &FeatureSource::native);
  std::vector<std::optional<ParamTrack>> tracks(eval.size());
  if (any_native) {
    internal::ParallelFor(eval.size(), config.num_threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        try {
          tracks[i] = LoadUtteranceTrack(eval[i], config.analysis);
        } catch (const Error& err) {
          throw WithUtterance(err, eval[i].utterance_id);
        }
      }
    });
  }

  ExperimentResult result;
  result.config = config;
  for (const FeatureSource& source : config.feature_sources) {
    for (std::size_t window : config.ma_windows) {
      const FeatureFactory factory(config, source, window);
      std::string tag;
      const std::vector<TrainedModel> models =
          TrainModels(config, factory, train, &tag);
      const RunContext ctx{config, kind_name, kind, factory, tag, window, models};
      const std::optional<ParamTrack> none;

      std::vector<std::vector<RawRecord>> per_utt(eval.size());
      std::vector<std::vector<TokenSequence>> orig_tokens(eval.size());
      const bool scaled = IsScaledKind(kind);
      internal::ParallelFor(eval.size(), config.num_threads, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
          const UtteranceManifest& utt = eval[i];
          try {
            const std::optional<ParamTrack>& track = source.native ? tracks[i] : none;
            if (scaled) {
              per_utt[i] = EvaluateScaled(ctx, utt, track);
            } else {
              orig_tokens[i] = TokenizeAll(
                  models, factory.Make(utt.utterance_id, "orig", [&] { return *track; }),
                  utt.utterance_id);
            }
          } catch (const Error& err) {
            throw WithUtterance(err, utt.utterance_id);
          }
        }
      });
      for (auto& recs : per_utt) {
        for (RawRecord& r : recs) result.records.push_back(std::move(r));
      }
      if (scaled) continue;

      for (std::size_t m = 0; m < models.size(); ++m) {
        const std::size_t k = models[m].k;
        std::vector<TokenSequence> seqs;
        for (const auto& per : orig_tokens) seqs.push_back(per[m]);

        if (kind == ExperimentKind::kRealSpeakerPairs) {
          const std::string cond(ExperimentKindName(kind));
          auto emit_groups = [&](auto key_of, const char* metric) {
            std::vector<std::string> order;
            std::map<std::string, std::vector<TokenSequence>> groups;
            for (std::size_t i = 0; i < eval.size(); ++i) {
              const std::optional<std::string> key = key_of(eval[i]);
              if (!key) continue;
              auto [it, inserted] = groups.try_emplace(*key);
              if (inserted) order.push_back(*key);
              it->second.push_back(seqs[i]);
            }
            for (const std::string& key : order) {
              const auto& members = groups[key];
              if (members.size() < 2) continue;
              result.records.push_back(MakeRecord(
                  ctx, key, cond, k, std::nullopt, metric,
                  MeanPairwiseTokenErrorRate(members, config.dedup_for_mter)));
            }
          };
          emit_groups([](const UtteranceManifest& u) { return std::optional(u.sentence_id); },
                      "mter");
          if (config.same_accent_subsets) {
            emit_groups(
                [](const UtteranceManifest& u) -> std::optional<std::string> {
                  if (!u.accent_tag) return std::nullopt;
                  return u.sentence_id + "|" + *u.accent_tag;
                },
                "mter_same_accent");
          }
        } else if (kind == ExperimentKind::kPnmi) {
          std::map<std::string, int> label_ids;
          std::vector<std::vector<int>> phones;
          for (std::size_t i = 0; i < eval.size(); ++i) {
            phones.push_back(PhoneLabelsAtFrames(eval[i].phone_segments, seqs[i].size(),
                                                 seqs[i].frame_period_ms, label_ids));
          }
          for (std::size_t i = 0; i < eval.size(); ++i) {
            try {
              const double v = PhoneNormalizedMutualInformation(
                  std::span(&seqs[i], 1), std::span(&phones[i], 1));
              result.records.push_back(MakeRecord(ctx, eval[i].utterance_id, "pnmi", k,
                                                  std::nullopt, "pnmi_utterance", v));
            } catch (const Error& err) {
              if (err.code() != ErrorCode::kDegeneratePhoneSet) throw;
            }
          }
          result.records.push_back(MakeRecord(ctx, std::string(kPooledUtterance), "pnmi", k,
                                              std::nullopt, "pnmi",
                                              PhoneNormalizedMutualInformation(seqs, phones),
                                              eval.size()));
        } else if (kind == ExperimentKind::kClusterHist) {
          const std::vector<double> hist = SortedClusterHistogram(seqs, k);
          for (std::size_t r = 0; r < hist.size(); ++r) {
            char name[32];
            std::snprintf(name, sizeof(name), "freq_rank_%05zu", r + 1);
            result.records.push_back(MakeRecord(ctx, std::string(kPooledUtterance),
                                                "cluster_hist", k, std::nullopt, name,
                                                hist[r], eval.size()));
          }
        }
      }
    }
  }
  result.entries = AggregateRecords(result.records);
  return result;
}

std::vector<ModifiedRendition> PlanRenditions(const ExperimentConfig& config) {
  ValidateExperimentConfig(config);
  const ExperimentKind kind = EffectiveKind(config);
  std::vector<ModifiedRendition> out;
  for (const UtteranceManifest& utt : ReadManifest(config.eval_manifest)) {
    const ParamTrack track = LoadUtteranceTrack(utt, config.analysis);
    out.push_back({"orig", utt.utterance_id, track});
    if (!IsScaledKind(kind)) continue;
    for (double scale : config.scale_grid) {
      if (IsWordKind(kind)) {
        out.push_back({ConditionName(kind, scale, std::nullopt, true), utt.utterance_id,
                       ApplyModification(kind, track, scale, std::nullopt)});
        for (const auto& [w, frames] : WordFrames(utt, track)) {
          out.push_back({ConditionName(kind, scale, w), utt.utterance_id,
                         ApplyModification(kind, track, scale, frames)});
        }
      } else {
        out.push_back({ConditionName(kind, scale), utt.utterance_id,
                       ApplyModification(kind, track, scale, std::nullopt)});
      }
    }
  }
  return out;
}

std::vector<ComparisonRow> CompareConditions(std::span<const RawRecord> a,
                                             std::span<const RawRecord> b) {
  using RowKey = std::pair<GroupKey, std::string>;
  auto collect = [](std::span<const RawRecord> records, std::vector<RowKey>* order) {
    std::map<RowKey, std::map<std::string, double>> rows;
    for (const RawRecord& r : records) {
      if (r.utterance_id == kPooledUtterance) continue;
      RowKey key{KeyOf(r), r.metric};
      auto [it, inserted] = rows.try_emplace(key);
      if (inserted && order != nullptr) order->push_back(key);
      it->second[r.utterance_id] = r.value;
    }
    return rows;
  };
  std::vector<RowKey> order;
  const auto rows_a = collect(a, &order);
  const auto rows_b = collect(b, nullptr);
  if (rows_a.size() != rows_b.size()) {
    throw Error(ErrorCode::kUtteranceSetMismatch,
                "runs report different condition sets (" + std::to_string(rows_a.size()) +
                    " vs " + std::to_string(rows_b.size()) + " rows)");
  }

  std::vector<ComparisonRow> out;
  for (const RowKey& key : order) {
    const auto& values_a = rows_a.at(key);
    const auto it = rows_b.find(key);
    if (it == rows_b.end()) {
      throw Error(ErrorCode::kUtteranceSetMismatch,
                  "row '" + std::get<1>(key.first) + "/" + key.second + "' missing from run b");
    }
    const auto& values_b = it->second;
    std::vector<double> xs, ys;
    for (const auto& [utt, v] : values_a) {
      const auto match = values_b.find(utt);
      if (match == values_b.end()) {
        throw Error(ErrorCode::kUtteranceSetMismatch,
                    "utterance '" + utt + "' missing from run b");
      }
      xs.push_back(v);
      ys.push_back(match->second);
    }
    if (values_b.size() != values_a.size()) {
      throw Error(ErrorCode::kUtteranceSetMismatch,
                  "run b has utterances absent from run a");
    }

    ComparisonRow row;
    const auto& [kind, cond, k, tag, window, scale] = key.first;
    row.kind = kind;
    row.condition_id = cond;
    row.k = k;
    row.source_tag = tag;
    row.window = window;
    row.scale = scale;
    row.metric = key.second;
    row.n = xs.size();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      row.mean_a += xs[i];
      row.mean_b += ys[i];
    }
    row.mean_a /= static_cast<double>(row.n);
    row.mean_b /= static_cast<double>(row.n);
    try {
      const TTestResult t = PairedTTest(xs, ys);
      row.t_statistic = t.t_statistic;
      row.p_value = t.p_value;
    } catch (const Error& err) {
      if (err.code() == ErrorCode::kZeroVariance) {
        const double shift = row.mean_a - row.mean_b;
        row.t_statistic = shift == 0.0 ? 0.0 : std::copysign(INFINITY, shift);
        row.p_value = shift == 0.0 ? 1.0 : 0.0;
      } else if (err.code() != ErrorCode::kTooShort) {
        throw;
      }
    }
    row.significant = row.p_value < 0.05;
    if (row.significant) row.higher = row.mean_a > row.mean_b ? "a" : "b";
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace prosodybench
