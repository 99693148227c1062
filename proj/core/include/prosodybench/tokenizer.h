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

#ifndef PROSODYBENCH_TOKENIZER_H_
#define PROSODYBENCH_TOKENIZER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "prosodybench/feature_pipeline.h"
#include "prosodybench/matrix.h"

namespace prosodybench {

using Token = std::int32_t;

// Frame-synchronous token IDs for one utterance.
struct TokenSequence {
  std::vector<Token> tokens;
  double frame_period_ms = 5.0;
  std::string utterance_id;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

struct KMeansModel {
  Matrix centroids;  // k x D
  std::string feature_tag;
  std::uint64_t train_seed = 0;
  // Inertia after each assignment step of the winning run; non-increasing.
  // Not persisted by SaveModel.
  std::vector<double> inertia_history;
  // Set when the data had fewer distinct points than k, so some centroids
  // are duplicates.
  bool degenerate = false;

  std::size_t k() const { return centroids.rows(); }
  std::size_t dims() const { return centroids.cols(); }
};

struct KMeansOptions {
  std::size_t max_iters = 100;
  // Stop once the centroid shift, relative to the centroid norm, drops below
  // this value.
  double tol = 1e-4;
  // Independent k-means++ runs; the lowest final inertia wins.
  std::size_t restarts = 1;
  std::size_t num_threads = 1;
};

// k-means++ seeding followed by Lloyd iterations over the rows of `samples`.
// Deterministic in (samples, k, seed, options). Empty clusters are reseeded
// to the sample farthest from its assigned centroid. Throws kTooFewSamples
// when N < k and kNonFiniteValue for non-finite input.
KMeansModel KMeansTrain(const Matrix& samples, std::size_t k, std::uint64_t seed,
                        const KMeansOptions& options = {},
                        std::string feature_tag = {});

// Index of the nearest centroid for each row (squared Euclidean distance,
// lowest index on ties). `inertia`, when non-null, receives the summed
// squared distances.
std::vector<Token> AssignNearest(const Matrix& centroids, const Matrix& samples,
                                 double* inertia = nullptr,
                                 std::size_t num_threads = 1);

// Throws kDimensionMismatch when the feature and centroid widths differ.
TokenSequence KMeansAssign(const KMeansModel& model, const FeatureMatrix& features,
                           std::string utterance_id = {});

// Collapses runs of equal consecutive tokens.
TokenSequence Deduplicate(const TokenSequence& sequence);

// Stacks frames from every matrix, keeping at most `cap` rows chosen at
// evenly spaced positions across the concatenation.
Matrix BuildTrainingPool(std::span<const FeatureMatrix> features, std::size_t cap);

// "PBKM" model file. Centroids are stored as float32.
void SaveModel(const KMeansModel& model, const std::filesystem::path& path);
KMeansModel LoadModel(const std::filesystem::path& path);

}  // namespace prosodybench

#endif  // PROSODYBENCH_TOKENIZER_H_
