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

#ifndef PROSODYBENCH_EXPERIMENT_H_
#define PROSODYBENCH_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prosodybench/feature_pipeline.h"
#include "prosodybench/manifest.h"
#include "prosodybench/metrics.h"
#include "prosodybench/tokenizer.h"
#include "prosodybench/vocoder_params.h"

namespace prosodybench {

enum class ExperimentKind {
  kWordPitch,
  kWordIntensity,
  kUttPitch,
  kUttIntensity,
  kSpeakerWarp,
  kRealSpeakerPairs,
  kPnmi,
  kClusterHist,
  kMaSweep,
};

std::string_view ExperimentKindName(ExperimentKind kind);
// Throws kConfigInvalid for unknown names.
ExperimentKind ParseExperimentKind(std::string_view name);

enum class Normalization { kNone, kPerUtterance };
// Where the moving average sits relative to per-utterance normalization.
enum class SmoothingOrder { kMaLast, kMaFirst };

// "native_logmel", or "external:<pattern>" where the pattern may contain
// {utt} (utterance id) and {cond} (modification condition, "orig" for the
// unmodified utterance). Relative patterns resolve against the config file.
struct FeatureSource {
  bool native = true;
  std::string pattern;

  std::string Describe() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kWordPitch;
  // The kind repeated across ma_windows when kind == kMaSweep.
  ExperimentKind sweep_kind = ExperimentKind::kWordPitch;
  std::vector<double> scale_grid;
  std::vector<std::size_t> cluster_sizes = {100};
  std::vector<std::size_t> ma_windows = {1};
  std::vector<FeatureSource> feature_sources = {FeatureSource{}};
  std::filesystem::path kmeans_train_manifest;
  std::filesystem::path eval_manifest;
  std::uint64_t seed = 0;
  Normalization normalization = Normalization::kNone;
  SmoothingOrder smoothing_order = SmoothingOrder::kMaLast;
  bool dedup_for_mter = true;
  bool same_accent_subsets = true;

  // Native log-mel extractor.
  std::size_t n_mels = 40;
  bool use_f0_channel = true;
  // Route native features through Synthesize() + Analyze() instead of
  // reading the modified ParamTrack directly.
  bool resynthesize = false;
  std::uint64_t synthesis_seed = 0;
  AnalysisConfig analysis;

  KMeansOptions kmeans;
  std::size_t train_frame_cap = 200000;

  std::size_t num_threads = 1;
};

// The paper-anchored default grid for a kind: alpha {1, 1.05, 1.15, 1.3},
// beta {1, 1.5, 2.2, 3}, gamma {1, 1.05, 1.1, 1.2}; empty for kinds that
// take no scale.
std::vector<double> DefaultScaleGrid(ExperimentKind kind);

// Parses the JSON config text. Relative paths resolve against base_dir.
// Unknown keys and out-of-range values throw kConfigInvalid.
ExperimentConfig ParseExperimentConfig(std::string_view text,
                                       const std::filesystem::path& base_dir);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);
void ValidateExperimentConfig(const ExperimentConfig& config);

// One per-utterance (or, with utterance_id "*", corpus-pooled) value.
struct RawRecord {
  std::string kind;
  std::string utterance_id;
  std::string condition_id;
  std::size_t k = 0;
  std::string source_tag;
  std::size_t window = 1;
  std::optional<double> scale;
  std::string metric;
  double value = 0.0;
  std::size_t n_items = 1;

  friend bool operator==(const RawRecord&, const RawRecord&) = default;
};

inline constexpr std::string_view kPooledUtterance = "*";

// Aggregated report row: a MetricsReport plus the coordinates it was
// measured at.
struct ReportEntry {
  std::string kind;
  std::size_t k = 0;
  std::string source_tag;
  std::size_t window = 1;
  std::optional<double> scale;
  MetricsReport report;
  // Number of items behind each metric in `report.values`.
  std::map<std::string, std::size_t> metric_items;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ReportEntry> entries;
  std::vector<RawRecord> records;
};

// Groups records by (kind, condition, k, source, window, scale) in order of
// first appearance. Each metric is the mean over per-utterance records, or
// the pooled record's value when one exists.
std::vector<ReportEntry> AggregateRecords(std::span<const RawRecord> records);

// Name of a modified rendition, used for {cond} in external feature
// patterns: "orig", "<kind>_s<scale>" for whole-utterance modifications,
// "<kind>_s<scale>_w<word>" for single-word ones and
// "<kind>_s<scale>_global" for the whole-utterance control of word kinds.
std::string ConditionName(ExperimentKind kind, double scale,
                          std::optional<std::size_t> word = std::nullopt,
                          bool global_control = false);

// Runs the configured experiment end to end. Deterministic: identical
// configs and inputs give identical records in identical order. Per-utterance
// failures are rethrown with the utterance id prepended.
ExperimentResult RunExperiment(const ExperimentConfig& config);

// One modified rendition of one utterance, as the batch `modify` command
// writes it out for external feature extraction.
struct ModifiedRendition {
  std::string condition;
  std::string utterance_id;
  ParamTrack track;
};

// Every rendition RunExperiment would evaluate for the eval manifest,
// including "orig". For kMaSweep the sweep kind's renditions are returned.
std::vector<ModifiedRendition> PlanRenditions(const ExperimentConfig& config);

// Per-row paired t-test between two runs over the same utterances.
struct ComparisonRow {
  std::string kind;
  std::string condition_id;
  std::size_t k = 0;
  std::string source_tag;
  std::size_t window = 1;
  std::optional<double> scale;
  std::string metric;
  std::size_t n = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double t_statistic = 0.0;
  double p_value = 1.0;
  bool significant = false;
  // "a", "b", or empty when not significant.
  std::string higher;
};

// Matches per-utterance records of `a` and `b` by coordinates and runs a
// paired t-test per row at p < 0.05. Identical samples count as not
// significant (p = 1); a nonzero constant shift as significant (p = 0, t
// infinite). Throws kUtteranceSetMismatch when a row's utterance sets differ.
std::vector<ComparisonRow> CompareConditions(std::span<const RawRecord> a,
                                             std::span<const RawRecord> b);

}  // namespace prosodybench

#endif  // PROSODYBENCH_EXPERIMENT_H_
