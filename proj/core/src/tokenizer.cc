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

#include "prosodybench/tokenizer.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binary_io.h"
#include "parallel.h"
#include "prosodybench/error.h"
#include "random.h"

namespace prosodybench {
namespace {

constexpr char kModelMagic[] = "PBKM";
constexpr std::uint16_t kModelVersion = 1;

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

// Per-sample nearest centroid and its squared distance.
struct Assignment {
  std::vector<Token> labels;
  std::vector<double> distances;

  double Inertia() const {
    double sum = 0.0;
    for (double d : distances) sum += d;
    return sum;
  }
};

Assignment Assign(const Matrix& centroids, const Matrix& samples,
                  std::size_t num_threads) {
  Assignment a;
  a.labels.resize(samples.rows());
  a.distances.resize(samples.rows());
  internal::ParallelFor(samples.rows(), num_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      Token label = 0;
      for (std::size_t j = 0; j < centroids.rows(); ++j) {
        const double d = SquaredDistance(samples.row(i), centroids.row(j));
        if (d < best) {
          best = d;
          label = static_cast<Token>(j);
        }
      }
      a.labels[i] = label;
      a.distances[i] = best;
    }
  });
  return a;
}

// k-means++: first center uniform, then proportional to squared distance to
// the nearest chosen center. Reports whether the data ran out of distinct
// points before k centers were placed.
Matrix SeedPlusPlus(const Matrix& samples, std::size_t k, internal::Rng& rng,
                    bool* degenerate) {
  const std::size_t n = samples.rows();
  Matrix centers(k, samples.cols());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = rng.Below(n);
  for (std::size_t c = 0; c < k; ++c) {
    std::ranges::copy(samples.row(pick), centers.row(c).begin());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(samples.row(i), centers.row(c)));
      total += nearest[i];
    }
    if (c + 1 == k) break;
    if (total <= 0.0) {
      *degenerate = true;
      continue;  // every remaining center duplicates `pick`
    }
    double target = rng.Uniform() * total;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      if (target < nearest[i]) {
        pick = i;
        break;
      }
      target -= nearest[i];
    }
  }
  return centers;
}

double FrobeniusNorm(const Matrix& m) {
  double sum = 0.0;
  for (double v : m.values()) sum += v * v;
  return std::sqrt(sum);
}

KMeansModel LloydRun(const Matrix& samples, std::size_t k, std::uint64_t run_seed,
                     const KMeansOptions& options) {
  internal::Rng rng(run_seed);
  KMeansModel model;
  model.centroids = SeedPlusPlus(samples, k, rng, &model.degenerate);

  Assignment assignment = Assign(model.centroids, samples, options.num_threads);
  model.inertia_history.push_back(assignment.Inertia());

  const std::size_t dims = samples.cols();
  for (std::size_t iter = 0; iter < options.max_iters; ++iter) {
    Matrix next(k, dims);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < samples.rows(); ++i) {
      const auto label = static_cast<std::size_t>(assignment.labels[i]);
      ++counts[label];
      std::span<double> acc = next.row(label);
      std::span<const double> x = samples.row(i);
      for (std::size_t d = 0; d < dims; ++d) acc[d] += x[d];
    }
    std::vector<double> distances = assignment.distances;
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        for (double& v : next.row(j)) v /= static_cast<double>(counts[j]);
        continue;
      }
      // Empty cluster: move it onto the worst-served sample.
      const auto far = static_cast<std::size_t>(
          std::ranges::max_element(distances) - distances.begin());
      std::ranges::copy(samples.row(far), next.row(j).begin());
      distances[far] = 0.0;
    }

    double shift = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      shift += SquaredDistance(next.row(j), model.centroids.row(j));
    }
    shift = std::sqrt(shift) / std::max(FrobeniusNorm(model.centroids), 1e-12);

    Assignment updated = Assign(next, samples, options.num_threads);
    const double inertia = updated.Inertia();
    // Exact arithmetic never increases inertia here; a rise is rounding
    // noise at a fixed point, so keep the previous state.
    if (inertia > model.inertia_history.back()) break;
    model.centroids = std::move(next);
    assignment = std::move(updated);
    model.inertia_history.push_back(inertia);
    if (shift < options.tol) break;
  }
  return model;
}

}  // namespace

std::vector<Token> AssignNearest(const Matrix& centroids, const Matrix& samples,
                                 double* inertia, std::size_t num_threads) {
  if (centroids.cols() != samples.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "feature width " + std::to_string(samples.cols()) +
                    " != centroid width " + std::to_string(centroids.cols()));
  }
  Assignment a = Assign(centroids, samples, num_threads);
  if (inertia != nullptr) *inertia = a.Inertia();
  return std::move(a.labels);
}

KMeansModel KMeansTrain(const Matrix& samples, std::size_t k, std::uint64_t seed,
                        const KMeansOptions& options, std::string feature_tag) {
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  if (samples.rows() < k) {
    throw Error(ErrorCode::kTooFewSamples,
                std::to_string(samples.rows()) + " samples for k=" + std::to_string(k));
  }
  if (samples.cols() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "samples have zero width");
  }
  for (double v : samples.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "non-finite sample");
  }

  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  KMeansModel best;
  for (std::size_t r = 0; r < restarts; ++r) {
    const std::uint64_t run_seed = r == 0 ? seed : internal::MixSeed(seed, r);
    KMeansModel run = LloydRun(samples, k, run_seed, options);
    if (r == 0 || run.inertia_history.back() < best.inertia_history.back()) {
      best = std::move(run);
    }
  }
  best.train_seed = seed;
  best.feature_tag = std::move(feature_tag);
  return best;
}

TokenSequence KMeansAssign(const KMeansModel& model, const FeatureMatrix& features,
                           std::string utterance_id) {
  TokenSequence seq;
  seq.tokens = AssignNearest(model.centroids, features.data);
  seq.frame_period_ms = features.frame_period_ms;
  seq.utterance_id = std::move(utterance_id);
  return seq;
}

TokenSequence Deduplicate(const TokenSequence& sequence) {
  TokenSequence out;
  out.frame_period_ms = sequence.frame_period_ms;
  out.utterance_id = sequence.utterance_id;
  for (Token t : sequence.tokens) {
    if (out.tokens.empty() || out.tokens.back() != t) out.tokens.push_back(t);
  }
  return out;
}

Matrix BuildTrainingPool(std::span<const FeatureMatrix> features, std::size_t cap) {
  std::size_t total = 0;
  std::size_t dims = 0;
  for (const FeatureMatrix& f : features) {
    if (f.frames() == 0) continue;
    if (dims == 0) dims = f.dims();
    if (f.dims() != dims) {
      throw Error(ErrorCode::kDimensionMismatch, "training features differ in width");
    }
    total += f.frames();
  }
  const std::size_t keep = std::min(total, cap);
  Matrix pool(keep, dims);
  std::size_t source = 0, consumed = 0;
  for (std::size_t i = 0; i < keep; ++i) {
    // Global frame index floor(i * total / keep), walked monotonically.
    const auto global = static_cast<std::size_t>(
        static_cast<std::uint64_t>(i) * total / keep);
    while (global >= consumed + features[source].frames()) {
      consumed += features[source].frames();
      ++source;
    }
    std::ranges::copy(features[source].data.row(global - consumed), pool.row(i).begin());
  }
  return pool;
}

void SaveModel(const KMeansModel& model, const std::filesystem::path& path) {
  if (model.feature_tag.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "feature tag too long");
  }
  internal::ByteWriter w;
  w.Magic({kModelMagic, 4});
  w.U16(kModelVersion);
  w.U32(static_cast<std::uint32_t>(model.k()));
  w.U32(static_cast<std::uint32_t>(model.dims()));
  w.U64(model.train_seed);
  w.U16(static_cast<std::uint16_t>(model.feature_tag.size()));
  w.Bytes(model.feature_tag);
  w.F32Array(model.centroids.values());
  internal::WriteFileAtomic(path, w.buffer());
}

KMeansModel LoadModel(const std::filesystem::path& path) {
  internal::ByteReader r(internal::ReadFileBytes(path));
  r.ExpectMagic({kModelMagic, 4});
  const std::uint16_t version = r.U16();
  if (version != kModelVersion) {
    throw Error(ErrorCode::kBadMagic,
                "unsupported PBKM version " + std::to_string(version));
  }
  const std::size_t k = r.U32();
  const std::size_t dims = r.U32();
  KMeansModel model;
  model.train_seed = r.U64();
  model.feature_tag = r.Bytes(r.U16());
  if (k == 0 || r.remaining() != k * dims * sizeof(float)) {
    throw Error(ErrorCode::kDimensionMismatch,
                path.string() + ": header says k=" + std::to_string(k) + ", D=" +
                    std::to_string(dims) + " but payload has " +
                    std::to_string(r.remaining()) + " bytes");
  }
  model.centroids = Matrix(k, dims);
  r.F32Array(model.centroids.values());
  for (double v : model.centroids.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "non-finite centroid");
  }
  return model;
}

}  // namespace prosodybench
