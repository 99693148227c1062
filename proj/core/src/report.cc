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

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "binary_io.h"
#include "json.hpp"
#include "prosodybench/error.h"

namespace prosodybench {
namespace {

using nlohmann::json;

std::string Join(const auto& values, auto&& fmt) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ';';
    out += fmt(v);
  }
  return out;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

template <typename T>
T ParseNumber(const std::string& s) {
  T value{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw Error(ErrorCode::kIoFailure, "malformed number '" + s + "' in report");
  }
  return value;
}

double ParseDouble(const std::string& s) {
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  return ParseNumber<double>(s);
}

json ScaleJson(const std::optional<double>& scale) {
  return scale ? json(*scale) : json(nullptr);
}

json RecordToJson(const RawRecord& r) {
  json j = json::object();
  j["kind"] = r.kind;
  j["utterance_id"] = r.utterance_id;
  j["condition_id"] = r.condition_id;
  j["k"] = r.k;
  j["source_tag"] = r.source_tag;
  j["window"] = r.window;
  j["scale"] = ScaleJson(r.scale);
  j["metric"] = r.metric;
  j["value"] = r.value;
  j["n_items"] = r.n_items;
  return j;
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

RunMetadata DescribeRun(const ExperimentConfig& c) {
  auto size_list = [](const std::vector<std::size_t>& v) {
    return Join(v, [](std::size_t x) { return std::to_string(x); });
  };
  RunMetadata m;
  m.emplace_back("experiment_kind", std::string(ExperimentKindName(c.kind)));
  if (c.kind == ExperimentKind::kMaSweep) {
    m.emplace_back("sweep_kind", std::string(ExperimentKindName(c.sweep_kind)));
  }
  m.emplace_back("ter_normalization", "edit_distance/reference_length");
  m.emplace_back("segment_ter_rule",
                 "tokens sliced to the word span at the token frame rate; mean over words, "
                 "then over utterances");
  m.emplace_back("mter_pair_rule",
                 "mean over unordered pairs of edit_distance/max_length");
  m.emplace_back("dedup_for_mter", c.dedup_for_mter ? "true" : "false");
  m.emplace_back("same_accent_subsets", c.same_accent_subsets ? "true" : "false");
  m.emplace_back("seed", std::to_string(c.seed));
  m.emplace_back("synthesis_seed", std::to_string(c.synthesis_seed));
  m.emplace_back("normalization",
                 c.normalization == Normalization::kPerUtterance ? "per_utterance" : "none");
  m.emplace_back("smoothing_order",
                 c.smoothing_order == SmoothingOrder::kMaFirst ? "ma_first" : "ma_last");
  m.emplace_back("resynthesize", c.resynthesize ? "true" : "false");
  m.emplace_back("scale_grid", Join(c.scale_grid, FormatDouble));
  m.emplace_back("cluster_sizes", size_list(c.cluster_sizes));
  m.emplace_back("ma_windows", size_list(c.ma_windows));
  m.emplace_back("feature_source",
                 Join(c.feature_sources, [](const FeatureSource& s) { return s.Describe(); }));
  m.emplace_back("n_mels", std::to_string(c.n_mels));
  m.emplace_back("use_f0_channel", c.use_f0_channel ? "true" : "false");
  m.emplace_back("kmeans_init", "kmeans++");
  m.emplace_back("kmeans_max_iters", std::to_string(c.kmeans.max_iters));
  m.emplace_back("kmeans_tol", FormatDouble(c.kmeans.tol));
  m.emplace_back("kmeans_restarts", std::to_string(c.kmeans.restarts));
  m.emplace_back("train_frame_cap", std::to_string(c.train_frame_cap));
  m.emplace_back("kmeans_train_manifest", c.kmeans_train_manifest.generic_string());
  m.emplace_back("eval_manifest", c.eval_manifest.generic_string());
  return m;
}

std::string RenderCsv(std::span<const ReportEntry> entries, const RunMetadata& metadata) {
  std::ostringstream out;
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  out << "condition_id,k,layer_or_source_tag,scale,window,metric,value,n_items\n";
  for (const ReportEntry& e : entries) {
    for (const auto& [metric, value] : e.report.values) {
      const auto items = e.metric_items.find(metric);
      const std::size_t n = items == e.metric_items.end() ? e.report.n_items : items->second;
      out << CsvField(e.report.condition_id) << ',' << e.k << ',' << CsvField(e.source_tag)
          << ',' << (e.scale ? FormatDouble(*e.scale) : "") << ',' << e.window << ','
          << CsvField(metric) << ',' << FormatDouble(value) << ',' << n << '\n';
    }
  }
  return out.str();
}

std::vector<CsvRow> ParseCsv(std::string_view text) {
  std::vector<CsvRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.starts_with('#')) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 8) {
      throw Error(ErrorCode::kIoFailure, "report row has " + std::to_string(f.size()) +
                                             " fields, expected 8");
    }
    CsvRow row;
    row.condition_id = f[0];
    row.k = ParseNumber<std::size_t>(f[1]);
    row.source_tag = f[2];
    if (!f[3].empty()) row.scale = ParseDouble(f[3]);
    row.window = ParseNumber<std::size_t>(f[4]);
    row.metric = f[5];
    row.value = ParseDouble(f[6]);
    row.n_items = ParseNumber<std::size_t>(f[7]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string RenderRecordsJsonl(std::span<const RawRecord> records) {
  std::string out;
  for (const RawRecord& r : records) {
    out += RecordToJson(r).dump();
    out += '\n';
  }
  return out;
}

std::vector<RawRecord> ParseRecordsJsonl(std::string_view text) {
  std::vector<RawRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      RawRecord r;
      r.kind = j.at("kind").get<std::string>();
      r.utterance_id = j.at("utterance_id").get<std::string>();
      r.condition_id = j.at("condition_id").get<std::string>();
      r.k = j.at("k").get<std::size_t>();
      r.source_tag = j.at("source_tag").get<std::string>();
      r.window = j.at("window").get<std::size_t>();
      if (!j.at("scale").is_null()) r.scale = j.at("scale").get<double>();
      r.metric = j.at("metric").get<std::string>();
      r.value = j.at("value").is_null() ? NAN : j.at("value").get<double>();
      r.n_items = j.at("n_items").get<std::size_t>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kIoFailure,
                  "records line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RawRecord> ReadRecords(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = internal::ReadFileBytes(path);
  return ParseRecordsJsonl(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

RunMetadata ReadRunMetadata(const std::filesystem::path& path) {
  RunMetadata m;
  if (!std::filesystem::exists(path)) return m;
  const std::vector<std::uint8_t> bytes = internal::ReadFileBytes(path);
  try {
    const json j = json::parse(bytes.begin(), bytes.end());
    for (const json& pair : j.at("metadata")) {
      m.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::string>());
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIoFailure, path.string() + ": " + e.what());
  }
  return m;
}

std::vector<std::filesystem::path> EmitReport(std::span<const ReportEntry> entries,
                                              std::span<const RawRecord> records,
                                              const RunMetadata& metadata,
                                              const std::filesystem::path& out_dir,
                                              ReportFormats formats) {
  if (entries.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no report entries to emit");
  }
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  if (formats.csv) {
    std::vector<std::string> kinds;
    std::map<std::string, std::vector<ReportEntry>> by_kind;
    for (const ReportEntry& e : entries) {
      auto [it, inserted] = by_kind.try_emplace(e.kind);
      if (inserted) kinds.push_back(e.kind);
      it->second.push_back(e);
    }
    for (const std::string& kind : kinds) {
      files.emplace_back(out_dir / (kind + ".csv"), RenderCsv(by_kind[kind], metadata));
    }
  }
  if (formats.jsonl) {
    files.emplace_back(out_dir / "records.jsonl", RenderRecordsJsonl(records));
  }
  json meta = json::object();
  meta["metadata"] = json::array();
  for (const auto& [key, value] : metadata) meta["metadata"].push_back({key, value});
  files.emplace_back(out_dir / "run_metadata.json", meta.dump(2) + "\n");

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoFailure,
                "cannot create " + out_dir.string() + ": " + ec.message());
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : files) {
    internal::WriteFileAtomic(path, text);
    written.push_back(path);
  }
  return written;
}

std::vector<std::filesystem::path> EmitReport(const ExperimentResult& result,
                                              const std::filesystem::path& out_dir,
                                              ReportFormats formats) {
  return EmitReport(result.entries, result.records, DescribeRun(result.config), out_dir,
                    formats);
}

std::string RenderComparisonCsv(std::span<const ComparisonRow> rows) {
  std::ostringstream out;
  out << "# test=paired_t_two_sided\n# alpha=0.05\n";
  out << "kind,condition_id,k,layer_or_source_tag,scale,window,metric,n,mean_a,mean_b,"
         "t,p,significant,higher\n";
  for (const ComparisonRow& r : rows) {
    out << CsvField(r.kind) << ',' << CsvField(r.condition_id) << ',' << r.k << ','
        << CsvField(r.source_tag) << ',' << (r.scale ? FormatDouble(*r.scale) : "") << ','
        << r.window << ',' << CsvField(r.metric) << ',' << r.n << ','
        << FormatDouble(r.mean_a) << ',' << FormatDouble(r.mean_b) << ','
        << FormatDouble(r.t_statistic) << ',' << FormatDouble(r.p_value) << ','
        << (r.significant ? "true" : "false") << ',' << r.higher << '\n';
  }
  return out.str();
}

void WriteComparisonCsv(std::span<const ComparisonRow> rows,
                        const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  internal::WriteFileAtomic(path, RenderComparisonCsv(rows));
}

}  // namespace prosodybench
