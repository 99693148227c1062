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

#include "prosodybench/synthetic_corpus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "prosodybench/error.h"
#include "random.h"

namespace prosodybench {
namespace {

enum class PhoneClass { kVowel, kSonorant, kVoicedFricative, kFricative, kStop, kSilence };

struct PhoneTemplate {
  const char* label;
  PhoneClass cls;
  std::array<double, 3> formants_hz;  // resonances, or noise center in [0]
  double level_db;
  double relative_duration;
};

// Rough American English formant values; only the relative layout matters.
constexpr std::array<PhoneTemplate, 8> kVowels = {{
    {"aa", PhoneClass::kVowel, {730, 1090, 2440}, 0.0, 1.3},
    {"iy", PhoneClass::kVowel, {270, 2290, 3010}, -2.0, 1.2},
    {"uw", PhoneClass::kVowel, {300, 870, 2240}, -3.0, 1.2},
    {"eh", PhoneClass::kVowel, {530, 1840, 2480}, -1.0, 1.1},
    {"ae", PhoneClass::kVowel, {660, 1720, 2410}, 0.0, 1.3},
    {"ao", PhoneClass::kVowel, {570, 840, 2410}, -1.0, 1.2},
    {"ih", PhoneClass::kVowel, {390, 1990, 2550}, -2.0, 1.0},
    {"er", PhoneClass::kVowel, {490, 1350, 1690}, -2.0, 1.1},
}};

constexpr std::array<PhoneTemplate, 12> kConsonants = {{
    {"m", PhoneClass::kSonorant, {280, 1300, 2500}, -12.0, 0.8},
    {"n", PhoneClass::kSonorant, {280, 1700, 2600}, -12.0, 0.8},
    {"l", PhoneClass::kSonorant, {360, 1300, 2700}, -8.0, 0.8},
    {"r", PhoneClass::kSonorant, {420, 1300, 1600}, -8.0, 0.8},
    {"z", PhoneClass::kVoicedFricative, {5000, 0, 0}, -15.0, 0.9},
    {"v", PhoneClass::kVoicedFricative, {3500, 0, 0}, -18.0, 0.8},
    {"s", PhoneClass::kFricative, {6000, 0, 0}, -18.0, 1.0},
    {"sh", PhoneClass::kFricative, {3500, 0, 0}, -16.0, 1.0},
    {"f", PhoneClass::kFricative, {4500, 0, 0}, -25.0, 0.9},
    {"h", PhoneClass::kFricative, {1500, 0, 0}, -25.0, 0.7},
    {"t", PhoneClass::kStop, {4000, 0, 0}, -20.0, 0.6},
    {"k", PhoneClass::kStop, {2500, 0, 0}, -20.0, 0.6},
}};

constexpr PhoneTemplate kSilence = {"sil", PhoneClass::kSilence, {0, 0, 0}, -50.0, 1.0};

bool IsVoiced(PhoneClass cls) {
  return cls == PhoneClass::kVowel || cls == PhoneClass::kSonorant ||
         cls == PhoneClass::kVoicedFricative;
}

double Gaussian(double x, double center, double width) {
  const double z = (x - center) / width;
  return std::exp(-0.5 * z * z);
}

// Linear-power envelope of a phone for a speaker with formant scale `rho`.
double EnvelopeAt(const PhoneTemplate& p, double hz, double rho) {
  const double level = std::pow(10.0, p.level_db / 10.0);
  constexpr double kFloor = 1e-6;
  switch (p.cls) {
    case PhoneClass::kVowel:
    case PhoneClass::kSonorant: {
      constexpr std::array<double, 3> gains = {1.0, 0.5, 0.25};
      constexpr std::array<double, 3> widths = {80.0, 110.0, 160.0};
      double v = 0.02 * std::exp(-hz / 1500.0);
      for (std::size_t i = 0; i < 3; ++i) {
        v += gains[i] * Gaussian(hz, rho * p.formants_hz[i], rho * widths[i]);
      }
      return level * v + kFloor;
    }
    case PhoneClass::kVoicedFricative:
    case PhoneClass::kFricative:
    case PhoneClass::kStop: {
      const double center = rho * p.formants_hz[0];
      double v = Gaussian(hz, center, 0.25 * center) + 0.01;
      if (p.cls == PhoneClass::kVoicedFricative) v += 0.3 * Gaussian(hz, rho * 250.0, 100.0);
      return level * v + kFloor;
    }
    case PhoneClass::kSilence:
      return level + kFloor;
  }
  return kFloor;
}

double ToFloat32(double v) { return static_cast<double>(static_cast<float>(v)); }

struct SentencePlan {
  std::vector<const PhoneTemplate*> phones;   // includes leading/trailing sil
  std::vector<double> duration_scale;         // per phone, sentence level
  std::vector<std::size_t> word_of_phone;     // SIZE_MAX for silence
  std::vector<double> word_prominence;        // per word, in [0, 1]
};

SentencePlan PlanSentence(const CorpusSpec& spec, std::uint64_t seed, std::size_t index) {
  internal::Rng rng(internal::MixSeed(seed, 1000 + index));
  SentencePlan plan;
  plan.phones.push_back(&kSilence);
  plan.word_of_phone.push_back(SIZE_MAX);
  const bool consonant_first = rng.Below(2) == 0;
  for (std::size_t p = 0; p < spec.phones_per_sentence; ++p) {
    const bool consonant = (p % 2 == 0) == consonant_first;
    plan.phones.push_back(consonant ? &kConsonants[rng.Below(kConsonants.size())]
                                    : &kVowels[rng.Below(kVowels.size())]);
    plan.word_of_phone.push_back(p / spec.phones_per_word);
  }
  plan.phones.push_back(&kSilence);
  plan.word_of_phone.push_back(SIZE_MAX);
  for (std::size_t p = 0; p < plan.phones.size(); ++p) {
    plan.duration_scale.push_back(rng.Uniform(0.8, 1.2));
  }
  const std::size_t words =
      (spec.phones_per_sentence + spec.phones_per_word - 1) / spec.phones_per_word;
  for (std::size_t w = 0; w < words; ++w) plan.word_prominence.push_back(rng.Uniform());
  return plan;
}

std::string Id(const char* prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02zu", prefix, n);
  return buf;
}

SyntheticUtterance Realize(const CorpusSpec& spec, std::uint64_t seed,
                           const SentencePlan& plan, std::size_t sentence,
                           std::size_t speaker) {
  const double fp = spec.frame_period_ms;
  internal::Rng duration_rng(
      internal::MixSeed(internal::MixSeed(seed, 5000 + speaker), sentence));

  // Phone durations in whole frames.
  std::vector<std::size_t> frames_of_phone;
  for (std::size_t p = 0; p < plan.phones.size(); ++p) {
    const double jitter = 1.0 + spec.duration_jitter * duration_rng.Uniform(-1.0, 1.0);
    const bool silence = plan.phones[p]->cls == PhoneClass::kSilence;
    const double ms = silence ? spec.silence_ms
                              : spec.phone_duration_ms * plan.phones[p]->relative_duration *
                                    plan.duration_scale[p] * jitter;
    frames_of_phone.push_back(std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(ms / fp))));
  }
  std::size_t total = 0;
  for (std::size_t n : frames_of_phone) total += n;

  const std::size_t bins = spec.fft_size / 2 + 1;
  const double rho =
      1.0 + (static_cast<double>(speaker) - static_cast<double>(spec.speakers - 1) / 2.0) *
                spec.formant_scale_step;
  const double speaker_f0 = spec.base_f0_hz + static_cast<double>(speaker) * spec.f0_offset_step_hz;
  const double nyquist = spec.sample_rate_hz / 2.0;

  SyntheticUtterance out;
  ParamTrack& track = out.track;
  track.frame_period_ms = fp;
  track.sample_rate_hz = spec.sample_rate_hz;
  track.f0.assign(total, 0.0);
  track.ap = Matrix(total, bins, 1.0);
  Matrix log_env(total, bins);
  std::vector<double> gain_db(total, 0.0);

  // Word spans in frames, for the f0 accent bumps.
  std::vector<std::pair<std::size_t, std::size_t>> word_frames(plan.word_prominence.size(),
                                                               {SIZE_MAX, 0});
  UtteranceManifest& m = out.manifest;
  std::size_t t0 = 0;
  for (std::size_t p = 0; p < plan.phones.size(); ++p) {
    const PhoneTemplate& phone = *plan.phones[p];
    const std::size_t n = frames_of_phone[p];
    m.phone_segments.push_back({static_cast<double>(t0) * fp / 1000.0,
                                static_cast<double>(t0 + n) * fp / 1000.0, phone.label});
    if (plan.word_of_phone[p] != SIZE_MAX) {
      auto& span = word_frames[plan.word_of_phone[p]];
      span.first = std::min(span.first, t0);
      span.second = std::max(span.second, t0 + n);
    }
    std::vector<double> env(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz = nyquist * static_cast<double>(k) / static_cast<double>(bins - 1);
      env[k] = std::log(EnvelopeAt(phone, hz, rho));
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t t = t0 + i;
      std::ranges::copy(env, log_env.row(t).begin());
      internal::Rng frame_rng(internal::MixSeed(internal::MixSeed(seed, 9000 + sentence),
                                                p * 4096 + i));
      gain_db[t] = 0.4 * frame_rng.Normal();
      if (IsVoiced(phone.cls)) {
        track.f0[t] = 1.0;  // voiced marker, replaced below
        const double ap = phone.cls == PhoneClass::kVoicedFricative ? 0.5 : 0.1;
        std::ranges::fill(track.ap.row(t), ap);
      }
    }
    t0 += n;
  }
  for (std::size_t w = 0; w < word_frames.size(); ++w) {
    m.word_segments.push_back({static_cast<double>(word_frames[w].first) * fp / 1000.0,
                               static_cast<double>(word_frames[w].second) * fp / 1000.0,
                               Id("w", w)});
  }

  // Sentence-level contours over normalized time, identical for every
  // speaker apart from the additive f0 offset.
  for (std::size_t t = 0; t < total; ++t) {
    const double u = (static_cast<double>(t) + 0.5) / static_cast<double>(total);
    double accent_hz = 0.0, accent_db = 0.0;
    for (std::size_t w = 0; w < word_frames.size(); ++w) {
      const auto [a, b] = word_frames[w];
      if (t < a || t >= b) continue;
      const double x = (static_cast<double>(t - a) + 0.5) / static_cast<double>(b - a);
      const double bump = std::sin(std::numbers::pi * x);
      accent_hz += 25.0 * plan.word_prominence[w] * bump;
      accent_db += 3.0 * plan.word_prominence[w] * bump;
    }
    gain_db[t] += -4.0 * u + accent_db;
    if (track.f0[t] > 0.0) {
      track.f0[t] = ToFloat32(speaker_f0 + 10.0 * std::sin(std::numbers::pi * u) -
                              20.0 * u + accent_hz);
    }
  }

  // Light temporal smoothing of the log envelope blurs phone boundaries.
  track.sp = Matrix(total, bins);
  for (std::size_t t = 0; t < total; ++t) {
    const std::size_t a = t >= 2 ? t - 2 : 0;
    const std::size_t b = std::min(total - 1, t + 2);
    const double gain = gain_db[t] * std::numbers::ln10 / 10.0;
    for (std::size_t k = 0; k < bins; ++k) {
      double sum = 0.0;
      for (std::size_t j = a; j <= b; ++j) sum += log_env(j, k);
      track.sp(t, k) = ToFloat32(std::exp(sum / static_cast<double>(b - a + 1) + gain));
    }
  }
  for (double& v : track.ap.values()) v = ToFloat32(v);

  m.utterance_id = Id("spk", speaker) + "_" + Id("sx", sentence);
  m.speaker_id = Id("spk", speaker);
  m.sentence_id = Id("sx", sentence);
  m.accent_tag = Id("acc", spec.accents > 0 ? speaker % spec.accents : 0);
  return out;
}

}  // namespace

std::vector<SyntheticUtterance> GenerateSyntheticCorpus(const CorpusSpec& spec,
                                                        std::uint64_t seed) {
  if (spec.speakers < 2 || spec.sentences < 2 || spec.phones_per_sentence < 3) {
    throw Error(ErrorCode::kSpecTooSmall,
                "corpus needs >= 2 speakers, >= 2 sentences and >= 3 phones per sentence");
  }
  if (spec.phones_per_word == 0 || !(spec.frame_period_ms > 0.0) ||
      spec.fft_size < 16 || spec.sample_rate_hz < 8000) {
    throw Error(ErrorCode::kInvalidArgument, "invalid corpus spec");
  }
  std::vector<SyntheticUtterance> corpus;
  corpus.reserve(spec.speakers * spec.sentences);
  for (std::size_t j = 0; j < spec.sentences; ++j) {
    const SentencePlan plan = PlanSentence(spec, seed, j);
    for (std::size_t s = 0; s < spec.speakers; ++s) {
      corpus.push_back(Realize(spec, seed, plan, j, s));
    }
  }
  return corpus;
}

std::vector<UtteranceManifest> WriteSyntheticCorpus(const CorpusSpec& spec,
                                                    std::uint64_t seed,
                                                    const std::filesystem::path& out_dir) {
  std::vector<SyntheticUtterance> corpus = GenerateSyntheticCorpus(spec, seed);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "params", ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + out_dir.string());
  std::vector<UtteranceManifest> manifest;
  for (SyntheticUtterance& u : corpus) {
    u.manifest.audio_or_param_path = out_dir / "params" / (u.manifest.utterance_id + ".pbpt");
    WriteParamTrack(u.track, u.manifest.audio_or_param_path);
    manifest.push_back(std::move(u.manifest));
  }
  WriteManifest(manifest, out_dir / "manifest.jsonl");
  return manifest;
}

}  // namespace prosodybench
