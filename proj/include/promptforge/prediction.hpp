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

#ifndef PROMPTFORGE_PREDICTION_HPP_
#define PROMPTFORGE_PREDICTION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptforge/backend.hpp"
#include "promptforge/error.hpp"
#include "promptforge/parallel.hpp"
#include "promptforge/prompt_set.hpp"
#include "promptforge/text.hpp"
#include "promptforge/types.hpp"

namespace promptforge {

struct LabelDistribution {
  double positive = 0.5;
  double negative = 0.5;

  double p(Label l) const { return l == Label::kPositive ? positive : negative; }
  // Exact ties go to Positive.
  Label argmax() const { return positive >= negative ? Label::kPositive : Label::kNegative; }
  bool tie() const { return positive == negative; }
};

// Softmax restricted to the two mapping-word logits.
inline LabelDistribution softmax_pair(double positive_logit, double negative_logit) {
  const double d = positive_logit - negative_logit;
  return {1.0 / (1.0 + std::exp(-d)), 1.0 / (1.0 + std::exp(d))};
}

inline LabelDistribution predict_one(const PromptTemplate& prompt, std::string_view sentence,
                                     Backend& backend, const ValidatedMapping& mapping,
                                     const RenderStyle& style) {
  const auto logits = backend.mask_logits(render(prompt, sentence, style), mapping.tokens);
  return softmax_pair(logits.at(mapping.mapping.positive()), logits.at(mapping.mapping.negative()));
}

inline LabelDistribution predict_one(const PromptTemplate& prompt, std::string_view sentence,
                                     Backend& backend, const ValidatedMapping& mapping) {
  return predict_one(prompt, sentence, backend, mapping, backend.handshake().render_style());
}

// Score-weighted mean of label distributions.
inline LabelDistribution aggregate(std::span<const LabelDistribution> dists,
                                   std::span<const std::uint64_t> scores) {
  if (dists.empty() || dists.size() != scores.size())
    throw Error(ErrorCode::kInvalidArgument, "aggregate needs equal, non-zero numbers of distributions and scores");
  long double total = 0, pos = 0, neg = 0;
  double pos_lo = 1, pos_hi = 0, neg_lo = 1, neg_hi = 0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto w = static_cast<long double>(scores[i]);
    total += w;
    pos += w * dists[i].positive;
    neg += w * dists[i].negative;
    if (scores[i] == 0) continue;
    pos_lo = std::min(pos_lo, dists[i].positive);
    pos_hi = std::max(pos_hi, dists[i].positive);
    neg_lo = std::min(neg_lo, dists[i].negative);
    neg_hi = std::max(neg_hi, dists[i].negative);
  }
  if (total == 0) throw Error(ErrorCode::kAllZeroScores, "all prompt scores are zero");
  LabelDistribution out{std::clamp(static_cast<double>(pos / total), pos_lo, pos_hi),
                        std::clamp(static_cast<double>(neg / total), neg_lo, neg_hi)};
  if (std::abs(out.positive + out.negative - 1.0) > 1e-9)
    throw Error(ErrorCode::kInternal, "aggregated distribution does not sum to 1");
  return out;
}

struct PromptRef {
  std::size_t rank = 0;
  std::uint64_t score = 0;
};

struct Prediction {
  std::size_t sentence_id = 0;
  std::string text_hash;
  LabelDistribution distribution;
  Label label = Label::kPositive;
  bool tie = false;
  std::vector<PromptRef> prompts_used;
};

struct PredictionFailure {
  std::size_t sentence_id = 0;
  std::string message;
};

struct PredictionRun {
  std::vector<Prediction> predictions;  // corpus order
  std::vector<PredictionFailure> failures;
};

// Predicts every sentence with the k best-ranked prompts. `ranked` must be
// in rank order. Sentences whose backend calls fail are reported in
// `failures` and left out of `predictions`.
inline PredictionRun predict_corpus(std::span<const ScoredPrompt> ranked, const Corpus& corpus,
                                    Backend& backend, const ValidatedMapping& mapping, std::size_t k,
                                    unsigned workers = 1) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (k > ranked.size())
    throw Error(ErrorCode::kInvalidArgument,
                "k = " + std::to_string(k) + " exceeds the " + std::to_string(ranked.size()) + " ranked prompts");
  const auto top = ranked.first(k);
  std::vector<std::uint64_t> scores;
  std::vector<PromptRef> used;
  std::uint64_t score_sum = 0;
  for (const auto& p : top) {
    scores.push_back(p.score);
    used.push_back({p.rank, p.score});
    score_sum += p.score;
  }
  if (k > 1 && score_sum == 0) throw Error(ErrorCode::kAllZeroScores, "top-k prompts all scored zero");
  const auto style = backend.handshake().render_style();

  std::vector<std::optional<Prediction>> slots(corpus.size());
  std::vector<std::string> errors(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    const auto& s = corpus.sentences[i];
    try {
      std::vector<LabelDistribution> dists;
      dists.reserve(k);
      for (const auto& p : top) dists.push_back(predict_one(p.prompt, s.text, backend, mapping, style));
      // A single prompt is used as-is, even when its score is zero.
      const auto d = k == 1 ? dists.front() : aggregate(dists, scores);
      slots[i] = Prediction{s.id, text::fnv1a_hex(s.text), d, d.argmax(), d.tie(), used};
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  PredictionRun run;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i])
      run.predictions.push_back(std::move(*slots[i]));
    else
      run.failures.push_back({corpus.sentences[i].id, errors[i]});
  }
  return run;
}

inline nlohmann::json to_json(const Prediction& p) {
  nlohmann::json used = nlohmann::json::array();
  for (const auto& u : p.prompts_used) used.push_back({{"rank", u.rank}, {"score", u.score}});
  return {{"id", p.sentence_id},
          {"text_hash", p.text_hash},
          {"p_positive", p.distribution.positive},
          {"label", label_name(p.label)},
          {"tie", p.tie},
          {"prompts_used", used}};
}

inline Prediction prediction_from_json(const nlohmann::json& j) {
  Prediction p;
  p.sentence_id = j.at("id").get<std::size_t>();
  p.text_hash = j.value("text_hash", std::string{});
  p.distribution.positive = j.at("p_positive").get<double>();
  p.distribution.negative = 1.0 - p.distribution.positive;
  p.label = parse_label_name(j.at("label").get<std::string>());
  p.tie = j.value("tie", false);
  for (const auto& u : j.value("prompts_used", nlohmann::json::array()))
    p.prompts_used.push_back({u.at("rank").get<std::size_t>(), u.at("score").get<std::uint64_t>()});
  return p;
}

}  // namespace promptforge

#endif  // PROMPTFORGE_PREDICTION_HPP_
