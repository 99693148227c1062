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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "oracles.h"

namespace prosodybench {
namespace {

using testing::CaughtCode;

Matrix Points(std::vector<std::vector<double>> rows) {
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Matrix RandomPoints(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, d);
  for (double& v : m.values()) v = g(rng);
  return m;
}

TEST(KMeansTest, SingleClusterIsTheMean) {
  const Matrix x = Points({{0, 0}, {2, 0}, {4, 6}});
  const KMeansModel m = KMeansTrain(x, 1, 3);
  EXPECT_NEAR(m.centroids(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(m.centroids(0, 1), 2.0, 1e-12);
}

TEST(KMeansTest, SquareCornersAreRecovered) {
  const Matrix x = Points({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  for (std::uint64_t seed : {0u, 1u, 2u, 99u}) {
    const KMeansModel m = KMeansTrain(x, 4, seed);
    EXPECT_EQ(m.inertia_history.back(), 0.0);
    std::vector<std::vector<double>> got;
    for (std::size_t j = 0; j < 4; ++j) got.push_back({m.centroids(j, 0), m.centroids(j, 1)});
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, (std::vector<std::vector<double>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  }
}

TEST(KMeansTest, TooFewSamplesAndBadInput) {
  EXPECT_EQ(CaughtCode([] { KMeansTrain(RandomPoints(3, 2, 0), 5, 0); }),
            ErrorCode::kTooFewSamples);
  Matrix bad = RandomPoints(5, 2, 0);
  bad(2, 1) = std::nan("");
  EXPECT_EQ(CaughtCode([&] { KMeansTrain(bad, 2, 0); }), ErrorCode::kNonFiniteValue);
}

TEST(KMeansTest, IdenticalPointsAreFlaggedDegenerate) {
  const Matrix x = Points({{1, 2}, {1, 2}, {1, 2}, {1, 2}});
  const KMeansModel m = KMeansTrain(x, 3, 0);
  EXPECT_TRUE(m.degenerate);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(m.centroids(j, 0), 1.0);
    EXPECT_EQ(m.centroids(j, 1), 2.0);
  }
}

TEST(KMeansTest, DeterministicAndMonotone) {
  const Matrix x = RandomPoints(400, 5, 21);
  KMeansOptions opt;
  opt.restarts = 3;
  const KMeansModel a = KMeansTrain(x, 12, 77, opt);
  const KMeansModel b = KMeansTrain(x, 12, 77, opt);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.inertia_history, b.inertia_history);
  for (std::size_t i = 1; i < a.inertia_history.size(); ++i) {
    EXPECT_LE(a.inertia_history[i], a.inertia_history[i - 1]);
  }
  opt.num_threads = 4;
  EXPECT_EQ(KMeansTrain(x, 12, 77, opt).centroids, a.centroids);
}

TEST(KMeansTest, ReassignmentInertiaMatchesHistory) {
  const Matrix x = RandomPoints(300, 3, 5);
  const KMeansModel m = KMeansTrain(x, 7, 1);
  double inertia = 0.0;
  AssignNearest(m.centroids, x, &inertia);
  EXPECT_NEAR(inertia, m.inertia_history.back(), 1e-6 * m.inertia_history.back());
}

TEST(KMeansTest, RestartsNeverWorsenAndReachBruteForceOptimum) {
  std::mt19937_64 rng(1234);
  for (int inst = 0; inst < 20; ++inst) {
    const std::size_t n = 6 + rng() % 5;
    const std::size_t k = 2 + rng() % 2;
    const Matrix x = RandomPoints(n, 2, rng());
    const double opt = testing::BruteKMeansOptimum(x, k);
    double previous = INFINITY;
    for (std::size_t restarts : {1u, 8u, 32u, 128u}) {
      KMeansOptions o;
      o.restarts = restarts;
      const double got = KMeansTrain(x, k, inst, o).inertia_history.back();
      EXPECT_LE(got, previous) << "instance " << inst << " restarts " << restarts;
      EXPECT_GE(got, opt - 1e-12) << "instance " << inst;
      previous = got;
    }
    EXPECT_NEAR(previous, opt, 1e-9 * (1 + opt)) << "instance " << inst;
  }
}

TEST(AssignTest, ExactHitAndTieBreak) {
  Matrix c(8, 1);
  for (std::size_t j = 0; j < 8; ++j) c(j, 0) = static_cast<double>(j) * 10.0;
  // Centroids 2 and 5 are placed symmetrically around 35 below.
  c(2, 0) = 30.0;
  c(5, 0) = 40.0;
  c(3, 0) = 100.0;
  c(4, 0) = 110.0;
  const Matrix x = Points({{70.0}, {35.0}});
  EXPECT_EQ(AssignNearest(c, x), (std::vector<Token>{7, 2}));
  EXPECT_EQ(CaughtCode([&] { AssignNearest(c, Points({{1.0, 2.0}})); }),
            ErrorCode::kDimensionMismatch);
}

TEST(DeduplicateTest, Examples) {
  auto dedup = [](std::vector<Token> t) {
    return Deduplicate(TokenSequence{std::move(t), 20.0, "u"}).tokens;
  };
  EXPECT_EQ(dedup({5, 5, 3, 3, 3, 7}), (std::vector<Token>{5, 3, 7}));
  EXPECT_EQ(dedup({5, 3, 7}), (std::vector<Token>{5, 3, 7}));
  EXPECT_EQ(dedup({1, 2, 1, 2}), (std::vector<Token>{1, 2, 1, 2}));
  EXPECT_EQ(dedup({}), (std::vector<Token>{}));
}

TEST(TrainingPoolTest, CapsAndSpreadsFrames) {
  std::vector<FeatureMatrix> feats(3);
  for (std::size_t u = 0; u < 3; ++u) {
    feats[u].data = Matrix(10, 1);
    for (std::size_t i = 0; i < 10; ++i) feats[u].data(i, 0) = static_cast<double>(u * 10 + i);
  }
  const Matrix all = BuildTrainingPool(feats, 1000);
  EXPECT_EQ(all.rows(), 30u);
  const Matrix some = BuildTrainingPool(feats, 6);
  ASSERT_EQ(some.rows(), 6u);
  EXPECT_EQ(testing::Values(some), (std::vector<double>{0, 5, 10, 15, 20, 25}));
}

TEST(ModelFileTest, RoundTripAndErrors) {
  testing::ScratchDir dir("pbkm");
  KMeansModel m = KMeansTrain(RandomPoints(50, 3, 2), 4, 42, {}, "native:logmel40+f0");
  for (double& v : m.centroids.values()) v = static_cast<float>(v);
  SaveModel(m, dir / "m.pbkm");
  const KMeansModel back = LoadModel(dir / "m.pbkm");
  EXPECT_EQ(back.centroids, m.centroids);
  EXPECT_EQ(back.feature_tag, m.feature_tag);
  EXPECT_EQ(back.train_seed, 42u);

  // Header says k=10 but only 9 centroid rows follow.
  testing::LeBytes b;
  b.Raw("PBKM").Put<std::uint16_t>(1).Put<std::uint32_t>(10).Put<std::uint32_t>(2)
      .Put<std::uint64_t>(0).Put<std::uint16_t>(0);
  for (int i = 0; i < 18; ++i) b.Put<float>(1.0f);
  std::ofstream(dir / "short.pbkm", std::ios::binary)
      .write(reinterpret_cast<const char*>(b.bytes.data()), static_cast<long>(b.bytes.size()));
  EXPECT_EQ(CaughtCode([&] { LoadModel(dir / "short.pbkm"); }), ErrorCode::kDimensionMismatch);
  b.bytes[0] = 'Q';
  std::ofstream(dir / "magic.pbkm", std::ios::binary)
      .write(reinterpret_cast<const char*>(b.bytes.data()), static_cast<long>(b.bytes.size()));
  EXPECT_EQ(CaughtCode([&] { LoadModel(dir / "magic.pbkm"); }), ErrorCode::kBadMagic);
}

}  // namespace
}  // namespace prosodybench
