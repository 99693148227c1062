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

// Command-line front end for the prosodybench toolkit.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prosodybench/audio_io.h"
#include "prosodybench/error.h"
#include "prosodybench/experiment.h"
#include "prosodybench/feature_pipeline.h"
#include "prosodybench/manifest.h"
#include "prosodybench/prosody_mod.h"
#include "prosodybench/report.h"
#include "prosodybench/synthetic_corpus.h"
#include "prosodybench/tokenizer.h"
#include "prosodybench/vocoder_params.h"

namespace fs = std::filesystem;
namespace pb = prosodybench;

namespace {

bool IsWav(const fs::path& p) { return p.extension() == ".wav"; }

pb::ParamTrack LoadTrack(const fs::path& path, const pb::AnalysisConfig& analysis) {
  if (IsWav(path)) {
    const pb::Audio audio = pb::ReadWav(path);
    return pb::Analyze(audio.samples, audio.sample_rate_hz, analysis);
  }
  return pb::ReadParamTrack(path);
}

void SaveTrack(const pb::ParamTrack& track, const fs::path& path, std::uint64_t seed) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (IsWav(path)) {
    pb::WriteWav({pb::Synthesize(track, seed), track.sample_rate_hz}, path);
  } else {
    pb::WriteParamTrack(track, path);
  }
}

struct FeatureOptions {
  std::size_t n_mels = 40;
  bool no_f0 = false;
  bool normalize = false;
  std::size_t window = 1;
};

pb::FeatureMatrix NativeFeatures(const pb::ParamTrack& track, const FeatureOptions& o) {
  pb::FeatureMatrix f = pb::ExtractLogMel(track, o.n_mels, !o.no_f0);
  if (o.normalize) f = pb::NormalizePerUtterance(f);
  return pb::MovingAverage(f, o.window);
}

void AddFeatureOptions(CLI::App* cmd, FeatureOptions& o) {
  cmd->add_option("--n-mels", o.n_mels, "Mel channels")->capture_default_str();
  cmd->add_flag("--no-f0", o.no_f0, "Omit the log-f0 channel");
  cmd->add_flag("--normalize", o.normalize, "Per-utterance z-normalization");
  cmd->add_option("--ma-window", o.window, "Odd moving-average window")->capture_default_str();
}

// --- synth-corpus -----------------------------------------------------------

struct SynthArgs {
  pb::CorpusSpec spec;
  std::uint64_t seed = 0;
  fs::path out;
  bool identical = false;
};

void RunSynth(const SynthArgs& a) {
  pb::CorpusSpec spec = a.spec;
  if (a.identical) {
    spec.f0_offset_step_hz = 0.0;
    spec.formant_scale_step = 0.0;
    spec.duration_jitter = 0.0;
  }
  const auto manifest = pb::WriteSyntheticCorpus(spec, a.seed, a.out);
  std::cout << "wrote " << manifest.size() << " utterances to "
            << (a.out / "manifest.jsonl").string() << "\n";
}

// --- modify -----------------------------------------------------------------

struct ModifyArgs {
  fs::path in;
  fs::path out;
  std::string kind;
  double scale = 1.0;
  std::optional<double> start_s;
  std::optional<double> end_s;
  fs::path config;
  fs::path out_dir;
  std::string format = "wav";
  std::uint64_t synthesis_seed = 0;
};

void RunModifySingle(const ModifyArgs& a) {
  const pb::AnalysisConfig analysis;
  const pb::ParamTrack track = LoadTrack(a.in, analysis);
  const pb::ExperimentKind kind = pb::ParseExperimentKind(a.kind);
  pb::FrameRange frames{0, track.frames()};
  if (a.start_s || a.end_s) {
    frames = pb::SegmentToFrames({a.start_s.value_or(0.0),
                                  a.end_s.value_or(static_cast<double>(track.frames()) *
                                                   track.frame_period_ms / 1000.0),
                                  ""},
                                 track.frame_period_ms);
    frames.end = std::min(frames.end, track.frames());
  }
  pb::ParamTrack out;
  switch (kind) {
    case pb::ExperimentKind::kWordPitch: out = pb::ModifyWordPitch(track, frames, a.scale); break;
    case pb::ExperimentKind::kWordIntensity: out = pb::ModifyWordIntensity(track, frames, a.scale); break;
    case pb::ExperimentKind::kUttPitch: out = pb::ModifyUtterancePitchRange(track, a.scale); break;
    case pb::ExperimentKind::kUttIntensity: out = pb::ModifyUtteranceIntensityRange(track, a.scale); break;
    case pb::ExperimentKind::kSpeakerWarp: out = pb::WarpSpeaker(track, a.scale); break;
    default:
      throw pb::Error(pb::ErrorCode::kInvalidArgument,
                      "kind '" + a.kind + "' is not a modification");
  }
  SaveTrack(out, a.out, a.synthesis_seed);
}

// Writes every rendition of the config's eval manifest as
// <out_dir>/<condition>/<utterance>.<ext> plus one manifest per condition,
// ready for an external feature extractor.
void RunModifyBatch(const ModifyArgs& a) {
  const pb::ExperimentConfig config = pb::LoadExperimentConfig(a.config);
  if (a.format != "wav" && a.format != "pbpt") {
    throw pb::Error(pb::ErrorCode::kInvalidArgument, "--format must be wav or pbpt");
  }
  std::map<std::string, pb::UtteranceManifest> source;
  for (auto& u : pb::ReadManifest(config.eval_manifest)) source[u.utterance_id] = u;

  std::vector<std::string> order;
  std::map<std::string, std::vector<pb::UtteranceManifest>> per_condition;
  std::size_t count = 0;
  for (const pb::ModifiedRendition& r : pb::PlanRenditions(config)) {
    const fs::path file = a.out_dir / r.condition / (r.utterance_id + "." + a.format);
    SaveTrack(r.track, file, config.synthesis_seed);
    pb::UtteranceManifest m = source.at(r.utterance_id);
    m.audio_or_param_path = file;
    auto [it, inserted] = per_condition.try_emplace(r.condition);
    if (inserted) order.push_back(r.condition);
    it->second.push_back(std::move(m));
    ++count;
  }
  for (const std::string& cond : order) {
    pb::WriteManifest(per_condition[cond], a.out_dir / cond / "manifest.jsonl");
  }
  std::cout << "wrote " << count << " renditions in " << order.size() << " conditions to "
            << a.out_dir.string() << "\n";
}

// --- extract ----------------------------------------------------------------

struct ExtractArgs {
  fs::path in;
  fs::path out;
  fs::path manifest;
  fs::path out_dir;
  FeatureOptions features;
};

void RunExtract(const ExtractArgs& a) {
  const pb::AnalysisConfig analysis;
  if (!a.manifest.empty()) {
    if (a.out_dir.empty()) {
      throw pb::Error(pb::ErrorCode::kInvalidArgument, "--manifest requires --out-dir");
    }
    fs::create_directories(a.out_dir);
    const auto utts = pb::ReadManifest(a.manifest);
    for (const auto& u : utts) {
      pb::WriteFeatures(NativeFeatures(pb::LoadUtteranceTrack(u, analysis), a.features),
                        a.out_dir / (u.utterance_id + ".pbft"));
    }
    std::cout << "wrote " << utts.size() << " feature files to " << a.out_dir.string() << "\n";
    return;
  }
  if (a.in.empty() || a.out.empty()) {
    throw pb::Error(pb::ErrorCode::kInvalidArgument, "need --in and --out, or --manifest");
  }
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  pb::WriteFeatures(NativeFeatures(LoadTrack(a.in, analysis), a.features), a.out);
}

// --- kmeans-train -----------------------------------------------------------

struct TrainArgs {
  std::vector<fs::path> features;
  fs::path manifest;
  FeatureOptions native;
  std::size_t k = 100;
  std::uint64_t seed = 0;
  std::size_t cap = 200000;
  pb::KMeansOptions options;
  fs::path out;
};

void RunTrain(const TrainArgs& a) {
  std::vector<pb::FeatureMatrix> feats;
  for (const fs::path& p : a.features) feats.push_back(pb::ReadFeatures(p));
  if (!a.manifest.empty()) {
    for (const auto& u : pb::ReadManifest(a.manifest)) {
      feats.push_back(NativeFeatures(pb::LoadUtteranceTrack(u, {}), a.native));
    }
  }
  if (feats.empty()) {
    throw pb::Error(pb::ErrorCode::kInvalidArgument, "need --features or --manifest");
  }
  const pb::KMeansModel model = pb::KMeansTrain(pb::BuildTrainingPool(feats, a.cap), a.k,
                                                a.seed, a.options, feats.front().source_tag);
  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  pb::SaveModel(model, a.out);
  nlohmann::json summary = {{"k", model.k()},
                            {"dims", model.dims()},
                            {"iterations", model.inertia_history.size()},
                            {"final_inertia", model.inertia_history.empty()
                                                  ? 0.0
                                                  : model.inertia_history.back()},
                            {"degenerate", model.degenerate}};
  std::cout << summary.dump() << "\n";
}

// --- tokenize ---------------------------------------------------------------

struct TokenizeArgs {
  fs::path model;
  std::vector<fs::path> features;
  bool dedup = false;
  fs::path out;
};

void RunTokenize(const TokenizeArgs& a) {
  const pb::KMeansModel model = pb::LoadModel(a.model);
  std::ostringstream text;
  for (const fs::path& p : a.features) {
    pb::TokenSequence seq = pb::KMeansAssign(model, pb::ReadFeatures(p), p.stem().string());
    if (a.dedup) seq = pb::Deduplicate(seq);
    nlohmann::json j = {{"utterance_id", seq.utterance_id},
                        {"frame_period_ms", seq.frame_period_ms},
                        {"tokens", seq.tokens}};
    text << j.dump() << "\n";
  }
  if (a.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream(a.out) << text.str();
  }
}

// --- eval / compare / report ------------------------------------------------

struct EvalArgs {
  fs::path config;
  std::optional<std::uint64_t> seed;
  fs::path out_dir = "results";
  std::optional<std::size_t> threads;
};

void RunEval(const EvalArgs& a) {
  pb::ExperimentConfig config = pb::LoadExperimentConfig(a.config);
  if (a.seed) config.seed = *a.seed;
  if (a.threads) config.num_threads = *a.threads;
  const pb::ExperimentResult result = pb::RunExperiment(config);
  for (const fs::path& p : pb::EmitReport(result, a.out_dir)) std::cout << p.string() << "\n";
}

struct CompareArgs {
  fs::path a;
  fs::path b;
  fs::path out;
};

void RunCompare(const CompareArgs& a) {
  const auto rows = pb::CompareConditions(pb::ReadRecords(a.a), pb::ReadRecords(a.b));
  if (a.out.empty()) {
    std::cout << pb::RenderComparisonCsv(rows);
  } else {
    pb::WriteComparisonCsv(rows, a.out);
  }
}

struct ReportArgs {
  fs::path records;
  fs::path out_dir;
};

void RunReport(const ReportArgs& a) {
  const auto records = pb::ReadRecords(a.records);
  const auto metadata = pb::ReadRunMetadata(a.records.parent_path() / "run_metadata.json");
  const auto entries = pb::AggregateRecords(records);
  pb::ReportFormats formats;
  formats.jsonl = false;
  for (const fs::path& p : pb::EmitReport(entries, records, metadata, a.out_dir, formats)) {
    std::cout << p.string() << "\n";
  }
}

void PrintError(std::string_view code, std::string_view message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prosody sensitivity benchmark for discrete speech tokens"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth-corpus", "Generate a synthetic corpus");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--speakers", synth.spec.speakers)->capture_default_str();
  synth_cmd->add_option("--sentences", synth.spec.sentences)->capture_default_str();
  synth_cmd->add_option("--phones", synth.spec.phones_per_sentence, "Phones per sentence")
      ->capture_default_str();
  synth_cmd->add_option("--accents", synth.spec.accents)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_flag("--identical-speakers", synth.identical,
                      "Give every speaker the same f0, formants and timing");

  ModifyArgs modify;
  auto* modify_cmd = app.add_subcommand(
      "modify", "Apply a prosody or speaker modification to one track, or batch-render a config");
  modify_cmd->add_option("--in", modify.in, "Input .pbpt or .wav");
  modify_cmd->add_option("--out", modify.out, "Output .pbpt or .wav");
  modify_cmd->add_option("--kind", modify.kind,
                         "word_pitch, word_intensity, utt_pitch, utt_intensity, speaker_warp");
  modify_cmd->add_option("--scale", modify.scale)->capture_default_str();
  modify_cmd->add_option("--start-s", modify.start_s, "Word start (word kinds)");
  modify_cmd->add_option("--end-s", modify.end_s, "Word end (word kinds)");
  modify_cmd->add_option("--config", modify.config, "Batch mode: experiment config");
  modify_cmd->add_option("--out-dir", modify.out_dir, "Batch mode: output directory");
  modify_cmd->add_option("--format", modify.format, "Batch mode: wav or pbpt")
      ->capture_default_str();
  modify_cmd->add_option("--synthesis-seed", modify.synthesis_seed)->capture_default_str();

  ExtractArgs extract;
  auto* extract_cmd = app.add_subcommand("extract", "Compute native log-mel features");
  extract_cmd->add_option("--in", extract.in, "Input .pbpt or .wav");
  extract_cmd->add_option("--out", extract.out, "Output .pbft");
  extract_cmd->add_option("--manifest", extract.manifest, "Batch mode: manifest");
  extract_cmd->add_option("--out-dir", extract.out_dir, "Batch mode: output directory");
  AddFeatureOptions(extract_cmd, extract.features);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("kmeans-train", "Train a k-means tokenizer");
  train_cmd->add_option("--features", train.features, "Feature files (.pbft)");
  train_cmd->add_option("--manifest", train.manifest, "Compute native features for a manifest");
  AddFeatureOptions(train_cmd, train.native);
  train_cmd->add_option("-k,--k", train.k)->capture_default_str();
  train_cmd->add_option("--seed", train.seed)->capture_default_str();
  train_cmd->add_option("--cap", train.cap, "Maximum training frames")->capture_default_str();
  train_cmd->add_option("--max-iters", train.options.max_iters)->capture_default_str();
  train_cmd->add_option("--tol", train.options.tol)->capture_default_str();
  train_cmd->add_option("--restarts", train.options.restarts)->capture_default_str();
  train_cmd->add_option("--out", train.out, "Output model (.pbkm)")->required();

  TokenizeArgs tok;
  auto* tok_cmd = app.add_subcommand("tokenize", "Assign tokens with a trained model");
  tok_cmd->add_option("--model", tok.model)->required();
  tok_cmd->add_option("--features", tok.features)->required();
  tok_cmd->add_flag("--dedup", tok.dedup, "Collapse repeated tokens");
  tok_cmd->add_option("--out", tok.out, "JSONL output (stdout if omitted)");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Run an experiment config and emit reports");
  eval_cmd->add_option("--config", eval.config)->required();
  eval_cmd->add_option("--seed", eval.seed, "Override config seed");
  eval_cmd->add_option("--out-dir", eval.out_dir)->capture_default_str();
  eval_cmd->add_option("--threads", eval.threads, "Override runtime.num_threads");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Paired t-tests between two runs");
  cmp_cmd->add_option("--a", cmp.a, "records.jsonl of run a")->required();
  cmp_cmd->add_option("--b", cmp.b, "records.jsonl of run b")->required();
  cmp_cmd->add_option("--out", cmp.out, "CSV output (stdout if omitted)");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Re-aggregate records.jsonl into CSVs");
  rep_cmd->add_option("--records", rep.records)->required();
  rep_cmd->add_option("--out-dir", rep.out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    PrintError("UsageError", e.what());
    return 2;
  }

  try {
    if (*synth_cmd) RunSynth(synth);
    if (*modify_cmd) {
      if (!modify.config.empty()) {
        if (modify.out_dir.empty()) {
          throw pb::Error(pb::ErrorCode::kInvalidArgument, "--config requires --out-dir");
        }
        RunModifyBatch(modify);
      } else {
        if (modify.in.empty() || modify.out.empty() || modify.kind.empty()) {
          throw pb::Error(pb::ErrorCode::kInvalidArgument,
                          "need --in, --out and --kind, or --config and --out-dir");
        }
        RunModifySingle(modify);
      }
    }
    if (*extract_cmd) RunExtract(extract);
    if (*train_cmd) RunTrain(train);
    if (*tok_cmd) RunTokenize(tok);
    if (*eval_cmd) RunEval(eval);
    if (*cmp_cmd) RunCompare(cmp);
    if (*rep_cmd) RunReport(rep);
  } catch (const pb::Error& e) {
    PrintError(pb::ErrorCodeName(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    PrintError("Internal", e.what());
    return 1;
  }
  return 0;
}
