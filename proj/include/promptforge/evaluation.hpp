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

#ifndef PROMPTFORGE_EVALUATION_HPP_
#define PROMPTFORGE_EVALUATION_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptforge/backend.hpp"
#include "promptforge/error.hpp"
#include "promptforge/parallel.hpp"
#include "promptforge/prediction.hpp"
#include "promptforge/prompt_set.hpp"
#include "promptforge/text.hpp"
#include "promptforge/types.hpp"

namespace promptforge {

struct LabeledExample {
  Sentence sentence;
  Label gold = Label::kPositive;
};

struct TsvSchema {
  std::size_t sentence_col = 0;
  std::size_t label_col = 1;
  bool has_header = false;

  // GLUE-style SST-2: "sentence\tlabel" with a header row.
  static TsvSchema sst2() { return {0, 1, true}; }
  // MR / CR: two columns, no header.
  static TsvSchema two_column() { return {0, 1, false}; }
};

inline Label parse_gold_label(std::string_view s) {
  s = text::trim(s);
  if (s == "1") return Label::kPositive;
  if (s == "0") return Label::kNegative;
  return parse_label_name(s);
}

inline std::vector<LabeledExample> load_tsv(const std::string& path, const TsvSchema& schema,
                                            std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open dataset '" + path + "'");
  std::vector<LabeledExample> out;
  std::size_t line_no = 0;
  bool header_pending = schema.has_header;
  const std::size_t needed = std::max(schema.sentence_col, schema.label_col) + 1;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<std::string> cols;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < needed)
      throw Error(ErrorCode::kParseError, path + ":" + std::to_string(line_no) + ": expected " +
                                              std::to_string(needed) + " tab-separated columns");
    const auto sentence = text::trim(cols[schema.sentence_col]);
    if (sentence.empty()) throw Error(ErrorCode::kParseError, path + ":" + std::to_string(line_no) + ": empty sentence");
    Label gold;
    try {
      gold = parse_gold_label(cols[schema.label_col]);
    } catch (const Error&) {
      throw Error(ErrorCode::kUnknownLabel,
                  path + ":" + std::to_string(line_no) + ": label '" + cols[schema.label_col] + "'");
    }
    out.push_back({{out.size(), std::string(sentence)}, gold});
  }
  if (out.empty() && warnings) warnings->push_back("dataset '" + path + "' has no examples");
  return out;
}

inline Corpus corpus_of(std::span<const LabeledExample> examples, std::string source = {}) {
  Corpus c;
  c.source = std::move(source);
  for (const auto& e : examples) c.sentences.push_back(e.sentence);
  return c;
}

struct Confusion {
  std::uint64_t tp = 0;  // gold positive, predicted positive
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t n() const { return tp + tn + fp + fn; }
};

struct LabelMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::uint64_t support = 0;
};

struct EvalReport {
  double accuracy = 0;
  double macro_f1 = 0;
  double micro_f1 = 0;
  LabelMetrics positive;
  LabelMetrics negative;
  Confusion confusion;
  std::uint64_t n = 0;
  std::uint64_t ties = 0;
  nlohmann::json config_echo = nlohmann::json::object();
  std::vector<std::string> warnings;

  const LabelMetrics& per_label(Label l) const { return l == Label::kPositive ? positive : negative; }
};

namespace evaluation_detail {

// Zero denominators give 0.
inline LabelMetrics metrics_for(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::string_view name,
                                std::vector<std::string>& warnings) {
  LabelMetrics m;
  m.support = tp + fn;
  m.precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  if (tp + fp == 0) warnings.push_back("no predictions for label '" + std::string(name) + "'; F1 set to 0");
  m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace evaluation_detail

inline EvalReport compute_metrics(std::span<const Label> predicted, std::span<const Label> gold) {
  if (predicted.size() != gold.size())
    throw Error(ErrorCode::kIdMismatch, "prediction and gold counts differ");
  EvalReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool g = gold[i] == Label::kPositive, p = predicted[i] == Label::kPositive;
    if (g && p) ++r.confusion.tp;
    else if (!g && !p) ++r.confusion.tn;
    else if (!g && p) ++r.confusion.fp;
    else ++r.confusion.fn;
  }
  const auto& c = r.confusion;
  r.n = c.n();
  if (r.n == 0) {
    r.warnings.push_back("no examples to evaluate");
    return r;
  }
  r.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(r.n);
  r.positive = evaluation_detail::metrics_for(c.tp, c.fp, c.fn, "positive", r.warnings);
  r.negative = evaluation_detail::metrics_for(c.tn, c.fn, c.fp, "negative", r.warnings);
  r.macro_f1 = (r.positive.f1 + r.negative.f1) / 2.0;
  // Micro-averaging pools the per-label counts.
  const double pooled_tp = static_cast<double>(c.tp + c.tn);
  const double pooled_fp = static_cast<double>(c.fp + c.fn);
  const double pooled_fn = static_cast<double>(c.fn + c.fp);
  const double micro_p = pooled_tp / (pooled_tp + pooled_fp);
  const double micro_r = pooled_tp / (pooled_tp + pooled_fn);
  r.micro_f1 = micro_p + micro_r > 0 ? 2 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
  return r;
}

// Predictions are matched to gold by sentence id; the text hash, when
// present, must agree with the gold sentence.
inline EvalReport evaluate(std::span<const Prediction> predictions, std::span<const LabeledExample> gold) {
  std::map<std::size_t, const LabeledExample*> by_id;
  for (const auto& g : gold) by_id.emplace(g.sentence.id, &g);
  std::vector<Label> p, y;
  std::map<std::size_t, bool> seen;
  std::uint64_t ties = 0;
  for (const auto& pred : predictions) {
    auto it = by_id.find(pred.sentence_id);
    if (it == by_id.end())
      throw Error(ErrorCode::kIdMismatch, "prediction for unknown sentence id " + std::to_string(pred.sentence_id));
    if (!seen.emplace(pred.sentence_id, true).second)
      throw Error(ErrorCode::kIdMismatch, "duplicate prediction for sentence id " + std::to_string(pred.sentence_id));
    if (!pred.text_hash.empty() && pred.text_hash != text::fnv1a_hex(it->second->sentence.text))
      throw Error(ErrorCode::kIdMismatch, "sentence " + std::to_string(pred.sentence_id) +
                                              " text does not match the gold dataset");
    p.push_back(pred.label);
    y.push_back(it->second->gold);
    if (pred.tie) ++ties;
  }
  auto r = compute_metrics(p, y);
  r.ties = ties;
  if (predictions.size() < gold.size())
    r.warnings.push_back(std::to_string(gold.size() - predictions.size()) + " gold examples have no prediction");
  return r;
}

struct RankAccuracyRow {
  std::size_t rank = 0;
  std::uint64_t score = 0;
  double accuracy = 0;
};

namespace evaluation_detail {

// dists[p][s]: distribution of sentence s under ranked prompt p.
inline std::vector<std::vector<LabelDistribution>> distributions(std::span<const ScoredPrompt> prompts,
                                                                 std::span<const LabeledExample> examples,
                                                                 Backend& backend, const ValidatedMapping& mapping,
                                                                 unsigned workers) {
  const auto style = backend.handshake().render_style();
  std::vector<std::vector<LabelDistribution>> d(prompts.size(), std::vector<LabelDistribution>(examples.size()));
  parallel_for(prompts.size() * examples.size(), workers, [&](std::size_t job) {
    const auto p = job / examples.size(), s = job % examples.size();
    d[p][s] = predict_one(prompts[p].prompt, examples[s].sentence.text, backend, mapping, style);
  });
  return d;
}

inline std::vector<Label> golds(std::span<const LabeledExample> examples) {
  std::vector<Label> y;
  for (const auto& e : examples) y.push_back(e.gold);
  return y;
}

}  // namespace evaluation_detail

// Accuracy of each ranked prompt used alone, in rank order.
inline std::vector<RankAccuracyRow> rank_accuracy_curve(std::span<const ScoredPrompt> ranked,
                                                        std::span<const LabeledExample> examples,
                                                        Backend& backend, const ValidatedMapping& mapping,
                                                        unsigned workers = 1) {
  const auto d = evaluation_detail::distributions(ranked, examples, backend, mapping, workers);
  const auto y = evaluation_detail::golds(examples);
  std::vector<RankAccuracyRow> rows;
  for (std::size_t p = 0; p < ranked.size(); ++p) {
    std::vector<Label> pred;
    for (const auto& dist : d[p]) pred.push_back(dist.argmax());
    rows.push_back({ranked[p].rank, ranked[p].score, compute_metrics(pred, y).accuracy});
  }
  return rows;
}

struct TopKRow {
  std::size_t k = 0;
  double accuracy = 0;
  double macro_f1 = 0;
};

// Metrics of score-weighted aggregation over the top k prompts, k = 1..k_max.
inline std::vector<TopKRow> topk_curve(std::span<const ScoredPrompt> ranked, std::span<const LabeledExample> examples,
                                       Backend& backend, const ValidatedMapping& mapping, std::size_t k_max,
                                       unsigned workers = 1) {
  if (k_max < 1 || k_max > ranked.size())
    throw Error(ErrorCode::kInvalidArgument, "k_max must be in [1, " + std::to_string(ranked.size()) + "]");
  const auto top = ranked.first(k_max);
  const auto d = evaluation_detail::distributions(top, examples, backend, mapping, workers);
  const auto y = evaluation_detail::golds(examples);
  std::vector<TopKRow> rows;
  for (std::size_t k = 1; k <= k_max; ++k) {
    std::vector<std::uint64_t> scores;
    for (std::size_t p = 0; p < k; ++p) scores.push_back(top[p].score);
    std::vector<Label> pred;
    for (std::size_t s = 0; s < examples.size(); ++s) {
      if (k == 1) {
        pred.push_back(d[0][s].argmax());
        continue;
      }
      std::vector<LabelDistribution> col;
      for (std::size_t p = 0; p < k; ++p) col.push_back(d[p][s]);
      pred.push_back(aggregate(col, scores).argmax());
    }
    const auto r = compute_metrics(pred, y);
    rows.push_back({k, r.accuracy, r.macro_f1});
  }
  return rows;
}

inline nlohmann::json to_json(const LabelMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

inline nlohmann::json to_json(const EvalReport& r) {
  return {{"accuracy", r.accuracy},
          {"macro_f1", r.macro_f1},
          {"micro_f1", r.micro_f1},
          {"n", r.n},
          {"ties", r.ties},
          {"per_label", {{"positive", to_json(r.positive)}, {"negative", to_json(r.negative)}}},
          {"confusion", {{"tp", r.confusion.tp}, {"tn", r.confusion.tn}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}}},
          {"config_echo", r.config_echo},
          {"warnings", r.warnings}};
}

}  // namespace promptforge

#endif  // PROMPTFORGE_EVALUATION_HPP_
