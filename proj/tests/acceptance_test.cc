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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tolerances and time budgets are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "prosodybench/experiment.h"
#include "prosodybench/feature_pipeline.h"
#include "prosodybench/metrics.h"
#include "prosodybench/prosody_mod.h"
#include "prosodybench/report.h"
#include "prosodybench/synthetic_corpus.h"
#include "prosodybench/tokenizer.h"

namespace pb = prosodybench;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kPitchMeanRelTol = 1e-9;
constexpr double kLogIntensityRelTol = 1e-6;
constexpr double kKMeansSlack = 0.05;
constexpr double kPnmiTableTol = 1e-9;
constexpr double kAffineTol = 1e-9;
constexpr double kUttIntensityMaxTer = 0.01;
constexpr double kWordIntensityMinTer = 0.05;
constexpr double kTTestTol = 1e-3;
constexpr double kNormalizationScale = 2.2;

// Time budgets in seconds.
constexpr double kAlgebraBudget = 10;
constexpr double kEditBudget = 10;
constexpr double kKMeansBudget = 60;
constexpr double kEndToEndBudget = 300;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void Criterion(const std::string& name, double budget_s,
               const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_s > 0) {
    out.Check(elapsed < budget_s, "runtime " + std::to_string(elapsed) + " s over budget");
  }
  if (!out.pass) ++failures;
  std::printf("[%s] %s:%s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name.c_str(),
              out.detail.str().c_str(), elapsed);
  std::fflush(stdout);
}

void Note(const std::string& text) { std::printf("       note: %s\n", text.c_str()); }

std::string Fmt(double v) { return pb::FormatDouble(v); }

double VoicedMean(const pb::ParamTrack& t) {
  double s = 0;
  std::size_t n = 0;
  for (double f : t.f0) {
    if (f > 0) {
      s += f;
      ++n;
    }
  }
  return s / static_cast<double>(n);
}

double MeanVoicedLogIntensity(const pb::ParamTrack& t) {
  double s = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.frames(); ++i) {
    if (t.f0[i] <= 0) continue;
    double row = 0;
    for (double v : t.sp.row(i)) row += v;
    s += std::log(row / static_cast<double>(t.bins()));
    ++n;
  }
  return s / static_cast<double>(n);
}

bool RowsEqual(const pb::ParamTrack& a, const pb::ParamTrack& b, std::size_t i) {
  using pb::testing::BitsOf;
  if (BitsOf(a.f0[i]) != BitsOf(b.f0[i])) return false;
  for (std::size_t f = 0; f < a.bins(); ++f) {
    if (BitsOf(a.sp(i, f)) != BitsOf(b.sp(i, f))) return false;
    if (BitsOf(a.ap(i, f)) != BitsOf(b.ap(i, f))) return false;
  }
  return true;
}

void ModificationAlgebra(Outcome& out) {
  std::mt19937_64 rng(20260101);
  std::size_t locality_violations = 0, floored = 0;
  double worst_pitch = 0, worst_int = 0;
  bool warp_identity = true;
  const double alphas[] = {1.05, 1.15, 1.3};
  const double betas[] = {1.5, 2.2, 3.0};
  for (int n = 0; n < 100; ++n) {
    const std::size_t frames = 20 + rng() % 80;
    const std::size_t bins = 8 + rng() % 120;
    const pb::ParamTrack t = pb::testing::RandomTrack(rng, frames, bins);
    const std::size_t start = rng() % (frames - 1);
    const std::size_t end = start + 1 + rng() % (frames - start - 1);
    const pb::FrameRange range{start, end};

    const pb::ParamTrack wp = pb::ModifyWordPitch(t, range, alphas[n % 3]);
    const pb::ParamTrack wi = pb::ModifyWordIntensity(t, range, betas[n % 3]);
    for (std::size_t i = 0; i < frames; ++i) {
      if (i >= start && i < end) continue;
      if (!RowsEqual(t, wp, i) || !RowsEqual(t, wi, i)) ++locality_violations;
    }

    const pb::ParamTrack up = pb::ModifyUtterancePitchRange(t, alphas[n % 3]);
    for (double f : up.f0) floored += f == pb::kMinVoicedF0Hz;
    const double mu = VoicedMean(t);
    worst_pitch = std::max(worst_pitch, std::fabs(VoicedMean(up) - mu) / mu);

    const pb::ParamTrack ui = pb::ModifyUtteranceIntensityRange(t, betas[n % 3]);
    const double lmu = MeanVoicedLogIntensity(t);
    worst_int = std::max(worst_int, std::fabs(MeanVoicedLogIntensity(ui) - lmu) / std::fabs(lmu));

    warp_identity = warp_identity && pb::WarpSpeaker(t, 1.0) == t;
  }
  pb::ParamTrack row;
  row.f0 = {100};
  row.ap = pb::Matrix(1, 4);
  row.sp = pb::testing::RowMajor(1, 4, {0, 2, 4, 6});
  const bool warp_row =
      pb::testing::Values(pb::WarpSpeaker(row, 2.0).sp) == std::vector<double>{0, 1, 2, 3};

  out.detail << " locality_violations=" << locality_violations
             << " max_rel_pitch_mean_err=" << Fmt(worst_pitch)
             << " max_rel_log_intensity_err=" << Fmt(worst_int)
             << " warp_identity=" << warp_identity << " warp_row=" << warp_row;
  out.Check(locality_violations == 0, "locality");
  out.Check(floored == 0, "pitch floor engaged; mean check invalid");
  out.Check(worst_pitch <= kPitchMeanRelTol, "voiced mean");
  out.Check(worst_int <= kLogIntensityRelTol, "log-intensity mean");
  out.Check(warp_identity && warp_row, "warp");
}

void EditDistanceOracle(Outcome& out) {
  std::mt19937_64 rng(8);
  std::vector<std::vector<int>> seqs(48);
  for (auto& s : seqs) {
    s.resize(rng() % 9);
    for (int& v : s) v = static_cast<int>(rng() % 5);
  }
  std::size_t pairs = 0, mismatches = 0;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    for (std::size_t j = i; j < seqs.size(); ++j) {
      ++pairs;
      if (pb::Levenshtein(seqs[i], seqs[j]) != pb::testing::BruteLevenshtein(seqs[i], seqs[j])) {
        ++mismatches;
      }
    }
  }
  const std::string k = "kitten", s = "sitting";
  const std::size_t ks = pb::Levenshtein(std::vector<pb::Token>(k.begin(), k.end()),
                                         std::vector<pb::Token>(s.begin(), s.end()));
  out.detail << " pairs=" << pairs << " mismatches=" << mismatches << " kitten/sitting=" << ks;
  out.Check(pairs >= 1000 && mismatches == 0, "brute force agreement");
  out.Check(ks == 3, "kitten/sitting");
}

void KMeansOracle(Outcome& out) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  std::size_t instances = 0, within = 0, non_monotone = 0;
  double worst = 0;
  for (int inst = 0; inst < 60; ++inst) {
    const std::size_t n = 5 + rng() % 8;  // 5..12
    const std::size_t k = 1 + rng() % 3;  // 1..3
    const std::size_t d = 1 + rng() % 2;  // 1..2
    pb::Matrix x(n, d);
    for (double& v : x.values()) v = g(rng);
    const double opt = pb::testing::BruteKMeansOptimum(x, k);
    double best = INFINITY;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const pb::KMeansModel m = pb::KMeansTrain(x, k, seed);
      for (std::size_t i = 1; i < m.inertia_history.size(); ++i) {
        if (m.inertia_history[i] > m.inertia_history[i - 1]) ++non_monotone;
      }
      best = std::min(best, m.inertia_history.back());
    }
    ++instances;
    const double excess = opt > 0 ? best / opt - 1.0 : best;
    worst = std::max(worst, excess);
    if (best <= opt * (1.0 + kKMeansSlack) + 1e-12) ++within;
  }
  out.detail << " instances=" << instances << " within_5pct=" << within
             << " worst_excess=" << Fmt(worst) << " non_monotone_steps=" << non_monotone;
  out.Check(instances >= 50 && within == instances, "optimum gap");
  out.Check(non_monotone == 0, "Lloyd monotonicity");
}

void PnmiChecks(Outcome& out) {
  auto seq = [](std::vector<pb::Token> t) { return pb::TokenSequence{std::move(t), 20.0, "u"}; };
  const std::vector<pb::TokenSequence> bij = {seq({7, 7, 3, 5, 5, 3, 9})};
  const std::vector<std::vector<int>> bij_ph = {{0, 0, 1, 2, 2, 1, 3}};
  const double v_bij = pb::PhoneNormalizedMutualInformation(bij, bij_ph);
  const std::vector<pb::TokenSequence> one = {seq({4, 4, 4, 4, 4})};
  const std::vector<std::vector<int>> one_ph = {{0, 1, 2, 0, 1}};
  const double v_one = pb::PhoneNormalizedMutualInformation(one, one_ph);
  // Count table (phone a: token0 x2; phone b: token0 x1, token1 x1).
  const std::vector<pb::TokenSequence> tab = {seq({0, 0, 0, 1})};
  const std::vector<std::vector<int>> tab_ph = {{0, 0, 1, 1}};
  const double v_tab = pb::PhoneNormalizedMutualInformation(tab, tab_ph);
  const double hand = (0.5 * std::log(4.0 / 3.0) + 0.25 * std::log(2.0 / 3.0) +
                       0.25 * std::log(2.0)) / std::log(2.0);
  out.detail << " bijective=" << Fmt(v_bij) << " single_token=" << Fmt(v_one)
             << " table=" << Fmt(v_tab) << " hand=" << Fmt(hand);
  out.Check(v_bij == 1.0, "bijective");
  out.Check(v_one == 0.0, "single token");
  out.Check(std::fabs(v_tab - hand) <= kPnmiTableTol, "2x2 table");
}

void MovingAverageChecks(Outcome& out) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 5.0);
  pb::FeatureMatrix f;
  f.data = pb::Matrix(40, 6);
  for (double& v : f.data.values()) v = g(rng);
  const bool identity = pb::MovingAverage(f, 1) == f;

  pb::FeatureMatrix col;
  col.data = pb::testing::RowMajor(3, 1, {1, 3, 5});
  const std::vector<double> ma3 = pb::testing::Values(pb::MovingAverage(col, 3).data);

  double worst = 0;
  for (std::size_t w : {3u, 5u, 9u, 11u, 13u}) {
    pb::FeatureMatrix affine = f;
    for (double& v : affine.data.values()) v = 2.5 * v - 7.0;
    const std::vector<double> lhs = pb::testing::Values(pb::MovingAverage(affine, w).data);
    const std::vector<double> rhs = pb::testing::Values(pb::MovingAverage(f, w).data);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      worst = std::max(worst, std::fabs(lhs[i] - (2.5 * rhs[i] - 7.0)));
    }
  }
  out.detail << " w1_identity=" << identity << " [1,3,5]->[" << Fmt(ma3[0]) << ","
             << Fmt(ma3[1]) << "," << Fmt(ma3[2]) << "] affine_max_err=" << Fmt(worst);
  out.Check(identity, "W=1 identity");
  out.Check(ma3 == std::vector<double>{2, 3, 4}, "[1,3,5]");
  out.Check(worst <= kAffineTol, "affine commutation");
}

pb::ExperimentConfig CorpusConfig(const fs::path& manifest, const std::string& kind) {
  const std::string text = R"({"experiment_kind": ")" + kind +
                           R"(", "cluster_sizes": [100], "eval_manifest": ")" +
                           manifest.generic_string() + R"("})";
  return pb::ParseExperimentConfig(text, manifest.parent_path());
}

std::map<double, double> MetricByScale(const pb::ExperimentResult& r, const std::string& metric) {
  std::map<double, double> out;
  for (const pb::ReportEntry& e : r.entries) out[*e.scale] = e.report.values.at(metric);
  return out;
}

void MonotoneSensitivity(Outcome& out, const fs::path& manifest) {
  pb::ExperimentConfig c = CorpusConfig(manifest, "word_pitch");
  c.scale_grid = {1.0, 1.05, 1.15, 1.3};
  const auto ter = MetricByScale(pb::RunExperiment(c), "segment_ter");
  out.detail << " segment_ter:";
  for (const auto& [a, v] : ter) out.detail << " a=" << Fmt(a) << "->" << Fmt(v);
  double prev = -1;
  bool monotone = true;
  for (const auto& [a, v] : ter) {
    monotone = monotone && v >= prev;
    prev = v;
  }
  out.Check(ter.size() == 4, "grid");
  out.Check(monotone, "non-decreasing");
  out.Check(ter.at(1.0) == 0.0, "zero at 1.0");
  out.Check(ter.at(1.3) > 0.0, "positive at 1.3");
}

double GlobalControl = NAN;

void IntensityNormalization(Outcome& out, const fs::path& manifest) {
  pb::ExperimentConfig utt = CorpusConfig(manifest, "utt_intensity");
  utt.normalization = pb::Normalization::kPerUtterance;
  utt.scale_grid = {kNormalizationScale};
  const double utt_ter = MetricByScale(pb::RunExperiment(utt), "ter").at(kNormalizationScale);

  pb::ExperimentConfig word = CorpusConfig(manifest, "word_intensity");
  word.normalization = pb::Normalization::kPerUtterance;
  word.scale_grid = {kNormalizationScale};
  const pb::ExperimentResult wr = pb::RunExperiment(word);
  const double word_ter = MetricByScale(wr, "segment_ter").at(kNormalizationScale);
  GlobalControl = MetricByScale(wr, "segment_ter_global").at(kNormalizationScale);

  out.detail << " utt_intensity_ter=" << Fmt(utt_ter)
             << " word_intensity_segment_ter=" << Fmt(word_ter);
  out.Check(utt_ter < kUttIntensityMaxTer, "utt_intensity TER < 0.01");
  out.Check(word_ter > kWordIntensityMinTer, "word_intensity TER > 0.05");
}

std::vector<std::vector<pb::TokenSequence>> SentenceGroups(const fs::path& manifest) {
  const auto utts = pb::ReadManifest(manifest);
  std::vector<pb::FeatureMatrix> feats;
  for (const auto& u : utts) feats.push_back(pb::ExtractLogMel(pb::LoadUtteranceTrack(u, {}), 40, true));
  const pb::KMeansModel model =
      pb::KMeansTrain(pb::BuildTrainingPool(feats, 200000), 100, 0);
  std::map<std::string, std::vector<pb::TokenSequence>> groups;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    groups[utts[i].sentence_id].push_back(pb::KMeansAssign(model, feats[i], utts[i].utterance_id));
  }
  std::vector<std::vector<pb::TokenSequence>> out;
  for (auto& [id, g] : groups) out.push_back(std::move(g));
  return out;
}

void MterDedup(Outcome& out, const fs::path& identical_manifest, const fs::path& manifest) {
  const pb::ExperimentResult r =
      pb::RunExperiment(CorpusConfig(identical_manifest, "real_speaker_pairs"));
  double identical_mter = -1;
  for (const auto& e : r.entries) identical_mter = e.report.values.at("mter");

  std::size_t changed = 0, groups = 0;
  double mean_mter = 0;
  for (const auto& group : SentenceGroups(manifest)) {
    std::vector<pb::TokenSequence> doubled = group;
    for (auto& s : doubled) {
      std::vector<pb::Token> twice;
      for (pb::Token t : s.tokens) twice.insert(twice.end(), {t, t});
      s.tokens = std::move(twice);
    }
    const double a = pb::MeanPairwiseTokenErrorRate(group, true);
    const double b = pb::MeanPairwiseTokenErrorRate(doubled, true);
    if (std::memcmp(&a, &b, sizeof a) != 0) ++changed;
    mean_mter += a;
    ++groups;
  }
  out.detail << " identical_speakers_mter=" << Fmt(identical_mter) << " sentence_groups="
             << groups << " mean_mter=" << Fmt(mean_mter / static_cast<double>(groups))
             << " changed_after_duplication=" << changed;
  out.Check(identical_mter == 0.0, "identical speakers");
  out.Check(groups > 0 && changed == 0, "duplication invariance");
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void Determinism(Outcome& out, const fs::path& manifest, const fs::path& scratch) {
  std::size_t files = 0, differing = 0;
  for (const char* kind : {"word_pitch", "real_speaker_pairs"}) {
    for (int run = 0; run < 2; ++run) {
      pb::EmitReport(pb::RunExperiment(CorpusConfig(manifest, kind)),
                     scratch / ("run" + std::to_string(run) + "_" + kind));
    }
    for (const auto& entry : fs::directory_iterator(scratch / (std::string("run0_") + kind))) {
      ++files;
      const fs::path other = scratch / (std::string("run1_") + kind) / entry.path().filename();
      if (!fs::exists(other) || Slurp(entry.path()) != Slurp(other)) ++differing;
    }
  }
  out.detail << " files_compared=" << files << " differing=" << differing;
  out.Check(files >= 6 && differing == 0, "byte-identical outputs");
}

void PairedTTestCase(Outcome& out) {
  const std::vector<double> x = {1, 2, 3, 4, 5}, y(5, 0.0);
  const pb::TTestResult r = pb::PairedTTest(x, y);
  const double simpson = pb::testing::SimpsonTwoSidedP(r.t_statistic, 4);
  out.detail << " t=" << Fmt(r.t_statistic) << " p=" << Fmt(r.p_value)
             << " p_numerical_integration=" << Fmt(simpson);
  out.Check(std::fabs(r.t_statistic - 4.2426) <= kTTestTol, "t");
  out.Check(std::fabs(r.p_value - 0.0132) <= kTTestTol, "p");
  out.Check(std::fabs(r.p_value - simpson) <= kTTestTol, "p vs integration");
}

}  // namespace

int main() {
  pb::testing::ScratchDir scratch("acceptance");
  const fs::path corpus = scratch / "corpus";
  const fs::path identical = scratch / "identical";
  pb::WriteSyntheticCorpus(pb::CorpusSpec{}, 0, corpus);
  pb::CorpusSpec same;
  same.f0_offset_step_hz = 0;
  same.formant_scale_step = 0;
  same.duration_jitter = 0;
  pb::WriteSyntheticCorpus(same, 0, identical);
  const fs::path manifest = corpus / "manifest.jsonl";

  Criterion("modification algebra", kAlgebraBudget, ModificationAlgebra);
  Criterion("edit-distance oracle", kEditBudget, EditDistanceOracle);
  Criterion("k-means oracle", kKMeansBudget, KMeansOracle);
  Criterion("PNMI checks", 0, PnmiChecks);
  Criterion("moving-average checks", 0, MovingAverageChecks);
  Criterion("end-to-end monotone sensitivity", kEndToEndBudget,
            [&](Outcome& o) { MonotoneSensitivity(o, manifest); });
  Criterion("intensity-normalization analog", kEndToEndBudget,
            [&](Outcome& o) { IntensityNormalization(o, manifest); });
  if (!std::isnan(GlobalControl)) {
    Note("word_intensity whole-utterance control (same normalization, beta 2.2): "
         "segment_ter_global=" + Fmt(GlobalControl));
  }
  Criterion("MTER/dedup", 0, [&](Outcome& o) { MterDedup(o, identical / "manifest.jsonl", manifest); });
  Criterion("determinism", 0, [&](Outcome& o) { Determinism(o, manifest, scratch.path()); });
  Criterion("paired t-test", 0, PairedTTestCase);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
