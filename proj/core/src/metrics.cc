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

#include "prosodybench/metrics.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "prosodybench/error.h"

namespace prosodybench {
namespace {

bool SameFrameRate(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b));
}

std::span<const Token> Slice(const TokenSequence& seq, FrameRange range) {
  const std::size_t end = std::min(range.end, seq.size());
  if (range.start >= end) return {};
  return std::span<const Token>(seq.tokens).subspan(range.start, end - range.start);
}

// Continued fraction for the incomplete beta function (modified Lentz).
double BetaContinuedFraction(double a, double b, double x) {
  constexpr int kMaxIterations = 300;
  constexpr double kEpsilon = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEpsilon) break;
  }
  return h;
}

}  // namespace

std::size_t Levenshtein(std::span<const Token> a, std::span<const Token> b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diagonal = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t above = row[j];
      const std::size_t substitute = diagonal + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({substitute, above + 1, row[j - 1] + 1});
      diagonal = above;
    }
  }
  return row[b.size()];
}

double TokenErrorRate(const TokenSequence& ref, const TokenSequence& hyp) {
  if (ref.tokens.empty()) {
    throw Error(ErrorCode::kEmptyReference,
                "empty reference sequence '" + ref.utterance_id + "'");
  }
  return static_cast<double>(Levenshtein(ref.tokens, hyp.tokens)) /
         static_cast<double>(ref.size());
}

double SegmentTokenErrorRate(const TokenSequence& ref, const TokenSequence& hyp,
                             const Segment& segment) {
  if (!SameFrameRate(ref.frame_period_ms, hyp.frame_period_ms)) {
    throw Error(ErrorCode::kFrameRateMismatch,
                "reference at " + std::to_string(ref.frame_period_ms) +
                    " ms vs hypothesis at " + std::to_string(hyp.frame_period_ms) + " ms");
  }
  const FrameRange range = SegmentToFrames(segment, ref.frame_period_ms);
  const std::span<const Token> ref_slice = Slice(ref, range);
  const std::span<const Token> hyp_slice = Slice(hyp, range);
  if (ref_slice.empty() || hyp_slice.empty()) {
    throw Error(ErrorCode::kEmptySegment,
                "segment '" + segment.label + "' covers no frames of '" +
                    ref.utterance_id + "'");
  }
  return static_cast<double>(Levenshtein(ref_slice, hyp_slice)) /
         static_cast<double>(ref_slice.size());
}

double MeanPairwiseTokenErrorRate(std::span<const TokenSequence> sequences, bool dedup) {
  if (sequences.size() < 2) {
    throw Error(ErrorCode::kTooFewSequences, "MTER needs at least two sequences");
  }
  std::vector<TokenSequence> prepared;
  prepared.reserve(sequences.size());
  for (const TokenSequence& s : sequences) {
    prepared.push_back(dedup ? Deduplicate(s) : s);
    if (prepared.back().tokens.empty()) {
      throw Error(ErrorCode::kEmptyAfterDedup,
                  "sequence '" + s.utterance_id + "' is empty");
    }
  }
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    for (std::size_t j = i + 1; j < prepared.size(); ++j) {
      const std::size_t longest = std::max(prepared[i].size(), prepared[j].size());
      sum += static_cast<double>(Levenshtein(prepared[i].tokens, prepared[j].tokens)) /
             static_cast<double>(longest);
      ++pairs;
    }
  }
  return sum / static_cast<double>(pairs);
}

std::vector<int> PhoneLabelsAtFrames(std::span<const Segment> phones,
                                     std::size_t frames, double frame_period_ms,
                                     std::map<std::string, int>& label_ids) {
  std::vector<int> labels(frames, -1);
  for (std::size_t t = 0; t < frames; ++t) {
    const double mid_s = (static_cast<double>(t) + 0.5) * frame_period_ms / 1000.0;
    for (const Segment& seg : phones) {
      if (mid_s >= seg.start_s && mid_s < seg.end_s) {
        auto [it, inserted] =
            label_ids.try_emplace(seg.label, static_cast<int>(label_ids.size()));
        labels[t] = it->second;
        break;
      }
    }
  }
  return labels;
}

double PhoneNormalizedMutualInformation(std::span<const TokenSequence> tokens,
                                        std::span<const std::vector<int>> phones) {
  if (tokens.size() != phones.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(tokens.size()) + " token sequences vs " +
                    std::to_string(phones.size()) + " phone sequences");
  }
  std::map<std::pair<int, Token>, double> joint;
  std::map<int, double> phone_counts;
  std::map<Token, double> token_counts;
  double total = 0.0;
  for (std::size_t u = 0; u < tokens.size(); ++u) {
    if (tokens[u].size() != phones[u].size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "utterance '" + tokens[u].utterance_id + "': " +
                      std::to_string(tokens[u].size()) + " tokens vs " +
                      std::to_string(phones[u].size()) + " phone labels");
    }
    for (std::size_t t = 0; t < phones[u].size(); ++t) {
      const int phone = phones[u][t];
      if (phone < 0) continue;
      const Token token = tokens[u].tokens[t];
      joint[{phone, token}] += 1.0;
      phone_counts[phone] += 1.0;
      token_counts[token] += 1.0;
      total += 1.0;
    }
  }
  if (phone_counts.size() < 2) {
    throw Error(ErrorCode::kDegeneratePhoneSet,
                "phone entropy is zero with fewer than two phones");
  }
  // p log(1/p) written as (c / N) log(N / c) so that I and H share the exact
  // same terms when tokens relabel phones one-to-one.
  double entropy = 0.0;
  for (const auto& [phone, c] : phone_counts) entropy += (c / total) * std::log(total / c);
  double mutual = 0.0;
  for (const auto& [key, c] : joint) {
    const double cp = phone_counts[key.first];
    const double ct = token_counts[key.second];
    mutual += (c / total) * std::log((c * total) / (cp * ct));
  }
  return std::clamp(mutual / entropy, 0.0, 1.0);
}

std::vector<double> SortedClusterHistogram(std::span<const TokenSequence> sequences,
                                           std::size_t k) {
  std::vector<double> counts(k, 0.0);
  double total = 0.0;
  for (const TokenSequence& s : sequences) {
    for (Token t : s.tokens) {
      if (t < 0 || static_cast<std::size_t>(t) >= k) {
        throw Error(ErrorCode::kTokenOutOfRange,
                    "token " + std::to_string(t) + " outside [0, " + std::to_string(k) + ")");
      }
      counts[static_cast<std::size_t>(t)] += 1.0;
      total += 1.0;
    }
  }
  if (total > 0.0) {
    for (double& c : counts) c /= total;
  }
  std::ranges::sort(counts, std::greater<>());
  return counts;
}

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges fastest for x < (a + 1) / (a + b + 2); use the
  // symmetry I_x(a, b) = 1 - I_{1-x}(b, a) otherwise.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double StudentTTwoSidedP(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return RegularizedIncompleteBeta(df / 2.0, 0.5, df / (df + t * t));
}

TTestResult PairedTTest(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "paired samples differ in length: " + std::to_string(x.size()) +
                    " vs " + std::to_string(y.size()));
  }
  const std::size_t n = x.size();
  if (n < 2) throw Error(ErrorCode::kTooShort, "paired t-test needs n >= 2");

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i] - y[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = (x[i] - y[i]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  // Differences that agree to ~12 significant digits are a constant shift.
  if (sd <= 1e-12 * std::abs(mean) || sd == 0.0) {
    throw Error(ErrorCode::kZeroVariance, "paired differences have zero variance");
  }
  TTestResult result;
  result.degrees_of_freedom = n - 1;
  result.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
  result.p_value = StudentTTwoSidedP(result.t_statistic,
                                     static_cast<double>(result.degrees_of_freedom));
  return result;
}

}  // namespace prosodybench
