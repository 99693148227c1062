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

#include "prosodybench/report.h"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "oracles.h"

namespace prosodybench {
namespace {

std::string Slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<RawRecord> SampleRecords() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<RawRecord> out;
  for (const char* cond : {"word_pitch_s1.05", "word_pitch_s1.3"}) {
    for (int i = 0; i < 3; ++i) {
      out.push_back({"word_pitch", "utt" + std::to_string(i), cond, 100, "model:L10, tagged", 9,
                     1.05, "segment_ter", u(rng), 1});
    }
  }
  out.push_back({"pnmi", "*", "pnmi", 500, "native:logmel40+f0", 1, std::nullopt, "pnmi",
                 1.0 / 3.0, 16});
  return out;
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 2.2, 123456789.125, -0.0}) {
    EXPECT_EQ(std::stod(FormatDouble(v)), v);
  }
  EXPECT_EQ(FormatDouble(2.2), "2.2");
  EXPECT_EQ(FormatDouble(INFINITY), "inf");
}

TEST(ReportTest, CsvRoundTripsValues) {
  const auto records = SampleRecords();
  const auto entries = AggregateRecords(records);
  const auto rows = ParseCsv(RenderCsv(entries, {{"seed", "0"}}));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].source_tag, "model:L10, tagged");
  EXPECT_EQ(rows[0].window, 9u);
  EXPECT_EQ(rows[0].value, entries[0].report.values.at("segment_ter"));
  EXPECT_EQ(rows[0].n_items, 3u);
  EXPECT_FALSE(rows[2].scale.has_value());
  EXPECT_EQ(rows[2].value, 1.0 / 3.0);
  EXPECT_EQ(rows[2].n_items, 16u);
}

TEST(ReportTest, RecordsJsonlRoundTrip) {
  const auto records = SampleRecords();
  EXPECT_EQ(ParseRecordsJsonl(RenderRecordsJsonl(records)), records);
}

TEST(ReportTest, EmitWritesOneCsvPerKindAndIsDeterministic) {
  testing::ScratchDir a("report_a"), b("report_b");
  const auto records = SampleRecords();
  const auto entries = AggregateRecords(records);
  const RunMetadata meta = {{"ter_normalization", "edit_distance/reference_length"}};
  const auto files = EmitReport(entries, records, meta, a.path());
  EmitReport(entries, records, meta, b.path());
  EXPECT_EQ(files.size(), 4u);
  for (const char* name : {"word_pitch.csv", "pnmi.csv", "records.jsonl", "run_metadata.json"}) {
    ASSERT_TRUE(std::filesystem::exists(a / name)) << name;
    EXPECT_EQ(Slurp(a / name), Slurp(b / name)) << name;
  }
  EXPECT_EQ(Slurp(a / "pnmi.csv").rfind("# ter_normalization=edit_distance/reference_length\n", 0),
            0u);
  EXPECT_EQ(ReadRunMetadata(a / "run_metadata.json"), meta);
  EXPECT_EQ(ReadRecords(a / "records.jsonl"), records);
}

TEST(ReportTest, EmptyReportWritesNothing) {
  testing::ScratchDir dir("report_empty");
  const auto out = dir / "out";
  EXPECT_EQ(testing::CaughtCode([&] { EmitReport({}, {}, {}, out); }),
            ErrorCode::kInvalidArgument);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(ReportTest, DescribeRunRecordsDecisions) {
  ExperimentConfig c;
  c.seed = 77;
  const RunMetadata m = DescribeRun(c);
  auto find = [&](const std::string& k) {
    for (const auto& [key, value] : m) {
      if (key == k) return value;
    }
    return std::string("<missing>");
  };
  EXPECT_EQ(find("seed"), "77");
  EXPECT_EQ(find("ter_normalization"), "edit_distance/reference_length");
  EXPECT_NE(find("mter_pair_rule"), "<missing>");
  EXPECT_EQ(find("dedup_for_mter"), "true");
}

TEST(ReportTest, ComparisonCsv) {
  ComparisonRow r;
  r.kind = "word_pitch";
  r.condition_id = "c";
  r.k = 100;
  r.metric = "ter";
  r.n = 5;
  r.mean_a = 3;
  r.p_value = 0.0132;
  r.significant = true;
  r.higher = "a";
  const std::string csv = RenderComparisonCsv(std::vector{r});
  EXPECT_NE(csv.find("word_pitch,c,100,,,1,ter,5,3,0,0,0.0132,true,a\n"), std::string::npos);
}

}  // namespace
}  // namespace prosodybench
