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

#ifndef PROSODYBENCH_METRICS_H_
#define PROSODYBENCH_METRICS_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "prosodybench/tokenizer.h"
#include "prosodybench/vocoder_params.h"

namespace prosodybench {

// Aggregated metric values for one experimental condition.
struct MetricsReport {
  std::string condition_id;
  std::map<std::string, double> values;
  std::size_t n_items = 0;
};

// Unit-cost insertions, deletions and substitutions. Single-row DP,
// O(|a| * |b|) time and O(|b|) memory.
std::size_t Levenshtein(std::span<const Token> a, std::span<const Token> b);

// Token error rate: Levenshtein(ref, hyp) / |ref|. Throws kEmptyReference.
double TokenErrorRate(const TokenSequence& ref, const TokenSequence& hyp);

// TER restricted to the frames of `segment`, mapped at the streams' shared
// frame rate and clipped to each stream's length. The reference slice length
// is the denominator. Throws kFrameRateMismatch and kEmptySegment.
double SegmentTokenErrorRate(const TokenSequence& ref, const TokenSequence& hyp,
                             const Segment& segment);

// Mean over all unordered pairs of Levenshtein / max(|a|, |b|), optionally
// deduplicating each sequence first. Throws kTooFewSequences and
// kEmptyAfterDedup.
double MeanPairwiseTokenErrorRate(std::span<const TokenSequence> sequences, bool dedup);

// Phone label at each token frame, taken from the segment covering the
// frame's midpoint. Frames covered by no segment get -1. Labels are mapped
// to dense ids through `label_ids`, which grows as new labels appear.
std::vector<int> PhoneLabelsAtFrames(std::span<const Segment> phones,
                                     std::size_t frames, double frame_period_ms,
                                     std::map<std::string, int>& label_ids);

// Phone-normalized mutual information I(phone; token) / H(phone) over all
// frames pooled across utterances, natural logarithms, 0 log 0 = 0. Frames
// whose phone id is negative are skipped. Throws kLengthMismatch when an
// utterance's token and phone lists differ in length, and
// kDegeneratePhoneSet when fewer than two phones occur.
double PhoneNormalizedMutualInformation(std::span<const TokenSequence> tokens,
                                        std::span<const std::vector<int>> phones);

// Cluster usage frequencies over all sequences, sorted descending; length k,
// sums to 1. Throws kTokenOutOfRange for a token outside [0, k).
std::vector<double> SortedClusterHistogram(std::span<const TokenSequence> sequences,
                                           std::size_t k);

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
  std::size_t degrees_of_freedom = 0;
};

// Two-sided paired t-test on d = x - y with the (n - 1) sample standard
// deviation. Throws kLengthMismatch, kTooShort for n < 2, and kZeroVariance
// when the differences have no spread.
TTestResult PairedTTest(std::span<const double> x, std::span<const double> y);

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
double RegularizedIncompleteBeta(double a, double b, double x);

// Two-sided tail probability P(|T| >= |t|) for Student's t with `df`
// degrees of freedom.
double StudentTTwoSidedP(double t, double df);

}  // namespace prosodybench

#endif  // PROSODYBENCH_METRICS_H_
