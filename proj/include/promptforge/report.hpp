// Copyright 2026 The PromptForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROMPTFORGE_REPORT_HPP_
#define PROMPTFORGE_REPORT_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptforge/error.hpp"
#include "promptforge/evaluation.hpp"
#include "promptforge/prompt_set.hpp"

namespace promptforge::report {

// Writes through a temporary file and renames it into place.
inline void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorCode::kIoError, "short write to '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot move '" + tmp + "' into place: " + ec.message());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_file(path, doc.dump(2) + "\n");
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Shortest round-trip decimal form, matching the JSON output.
inline std::string number(double v) { return nlohmann::json(v).dump(); }

inline std::string ranking_csv(const std::vector<ScoredPrompt>& ranked) {
  std::string out = "rank,canonical,origin,score,max_score\n";
  for (const auto& s : ranked)
    out += std::to_string(s.rank) + "," + csv_field(canonical(s.prompt)) + "," +
           std::string(origin_name(s.provenance.origin)) + "," + std::to_string(s.score) + "," +
           std::to_string(s.max_score) + "\n";
  return out;
}

inline std::string eval_csv(const EvalReport& r) {
  std::string out = "metric,value\n";
  auto row = [&](std::string_view k, double v) { out += std::string(k) + "," + number(v) + "\n"; };
  row("accuracy", r.accuracy);
  row("macro_f1", r.macro_f1);
  row("micro_f1", r.micro_f1);
  row("positive_precision", r.positive.precision);
  row("positive_recall", r.positive.recall);
  row("positive_f1", r.positive.f1);
  row("negative_precision", r.negative.precision);
  row("negative_recall", r.negative.recall);
  row("negative_f1", r.negative.f1);
  out += "n," + std::to_string(r.n) + "\n";
  return out;
}

inline nlohmann::json to_json(const std::vector<TopKRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) arr.push_back({{"k", r.k}, {"accuracy", r.accuracy}, {"macro_f1", r.macro_f1}});
  return arr;
}

inline nlohmann::json to_json(const std::vector<RankAccuracyRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) arr.push_back({{"rank", r.rank}, {"score", r.score}, {"accuracy", r.accuracy}});
  return arr;
}

inline std::string topk_csv(const std::vector<TopKRow>& rows) {
  std::string out = "k,accuracy,macro_f1\n";
  for (const auto& r : rows)
    out += std::to_string(r.k) + "," + number(r.accuracy) + "," + number(r.macro_f1) + "\n";
  return out;
}

inline std::string rank_accuracy_csv(const std::vector<RankAccuracyRow>& rows) {
  std::string out = "rank,score,accuracy\n";
  for (const auto& r : rows)
    out += std::to_string(r.rank) + "," + std::to_string(r.score) + "," + number(r.accuracy) + "\n";
  return out;
}

// Two-column "x,y" tables for plotting.
inline std::string plot_csv(const std::vector<std::pair<double, double>>& points) {
  std::string out = "x,y\n";
  for (const auto& [x, y] : points) out += number(x) + "," + number(y) + "\n";
  return out;
}

}  // namespace promptforge::report

#endif  // PROMPTFORGE_REPORT_HPP_
