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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "prosodybench/feature_pipeline.h"
#include "prosodybench/metrics.h"
#include "prosodybench/tokenizer.h"
#include "prosodybench/vocoder_params.h"

namespace pb = prosodybench;

namespace {

std::vector<pb::Token> RandomTokens(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<pb::Token> out(n);
  for (pb::Token& t : out) t = static_cast<pb::Token>(rng() % 100);
  return out;
}

pb::Matrix RandomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  pb::Matrix m(rows, cols);
  for (double& v : m.values()) v = g(rng);
  return m;
}

// Two seconds of a gently gliding voiced track at 5 ms frames.
pb::ParamTrack GlideTrack(std::size_t frames) {
  pb::ParamTrack t;
  t.f0.resize(frames);
  t.sp = pb::Matrix(frames, 257);
  t.ap = pb::Matrix(frames, 257);
  for (std::size_t i = 0; i < frames; ++i) {
    t.f0[i] = 110.0 + 0.05 * static_cast<double>(i);
    for (std::size_t f = 0; f < 257; ++f) {
      t.sp(i, f) = 1e-3 / (1.0 + 0.02 * static_cast<double>(f));
      t.ap(i, f) = 0.1;
    }
  }
  return t;
}

void BM_Levenshtein(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = RandomTokens(n, 1);
  const auto b = RandomTokens(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pb::Levenshtein(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Levenshtein)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_AssignNearest(benchmark::State& state) {
  const pb::Matrix centroids = RandomMatrix(static_cast<std::size_t>(state.range(0)), 41, 3);
  const pb::Matrix frames = RandomMatrix(2000, 41, 4);
  for (auto _ : state) benchmark::DoNotOptimize(pb::AssignNearest(centroids, frames));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_AssignNearest)->Arg(50)->Arg(100)->Arg(200)->Arg(500);

void BM_KMeansTrain(benchmark::State& state) {
  const pb::Matrix x = RandomMatrix(static_cast<std::size_t>(state.range(0)), 41, 5);
  pb::KMeansOptions opt;
  opt.max_iters = 20;
  for (auto _ : state) benchmark::DoNotOptimize(pb::KMeansTrain(x, 100, 0, opt));
}
BENCHMARK(BM_KMeansTrain)->Arg(5000)->Arg(20000)->Unit(benchmark::kMillisecond);

void BM_ExtractLogMel(benchmark::State& state) {
  const pb::ParamTrack t = GlideTrack(400);
  for (auto _ : state) benchmark::DoNotOptimize(pb::ExtractLogMel(t, 40, true));
  state.SetItemsProcessed(state.iterations() * 400);
}
BENCHMARK(BM_ExtractLogMel);

void BM_MovingAverage(benchmark::State& state) {
  pb::FeatureMatrix f;
  f.data = RandomMatrix(400, 41, 6);
  const auto w = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pb::MovingAverage(f, w));
}
BENCHMARK(BM_MovingAverage)->Arg(3)->Arg(9)->Arg(21);

void BM_SynthesizeAnalyze(benchmark::State& state) {
  const pb::ParamTrack t = GlideTrack(400);
  for (auto _ : state) {
    const std::vector<double> wav = pb::Synthesize(t, 0);
    benchmark::DoNotOptimize(pb::Analyze(wav, t.sample_rate_hz));
  }
}
BENCHMARK(BM_SynthesizeAnalyze)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
