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

#ifndef PROSODYBENCH_REPORT_H_
#define PROSODYBENCH_REPORT_H_

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "prosodybench/experiment.h"

namespace prosodybench {

// Ordered key/value pairs describing how a run was configured. Written as
// "# key=value" lines at the top of every CSV and as run_metadata.json.
using RunMetadata = std::vector<std::pair<std::string, std::string>>;

RunMetadata DescribeRun(const ExperimentConfig& config);

struct ReportFormats {
  bool csv = true;
  bool jsonl = true;
};

// Writes <kind>.csv per experiment kind, records.jsonl and
// run_metadata.json under out_dir. Output bytes depend only on the inputs.
// Every file is rendered before the first one is written; an empty entry
// set throws kInvalidArgument and writes nothing. Returns the files written.
std::vector<std::filesystem::path> EmitReport(std::span<const ReportEntry> entries,
                                              std::span<const RawRecord> records,
                                              const RunMetadata& metadata,
                                              const std::filesystem::path& out_dir,
                                              ReportFormats formats = {});

std::vector<std::filesystem::path> EmitReport(const ExperimentResult& result,
                                              const std::filesystem::path& out_dir,
                                              ReportFormats formats = {});

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double value);

// CSV body for the entries of a single kind, metadata lines included.
std::string RenderCsv(std::span<const ReportEntry> entries, const RunMetadata& metadata);

// One parsed CSV data row.
struct CsvRow {
  std::string condition_id;
  std::size_t k = 0;
  std::string source_tag;
  std::optional<double> scale;
  std::size_t window = 1;
  std::string metric;
  double value = 0.0;
  std::size_t n_items = 0;
};

// Parses RenderCsv() output, skipping metadata lines. Throws kIoFailure on
// malformed rows.
std::vector<CsvRow> ParseCsv(std::string_view text);

std::string RenderRecordsJsonl(std::span<const RawRecord> records);
std::vector<RawRecord> ParseRecordsJsonl(std::string_view text);
std::vector<RawRecord> ReadRecords(const std::filesystem::path& path);

// Reads run_metadata.json; a missing file yields empty metadata.
RunMetadata ReadRunMetadata(const std::filesystem::path& path);

std::string RenderComparisonCsv(std::span<const ComparisonRow> rows);
void WriteComparisonCsv(std::span<const ComparisonRow> rows, const std::filesystem::path& path);

}  // namespace prosodybench

#endif  // PROSODYBENCH_REPORT_H_
