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

#ifndef PROMPTFORGE_BACKEND_HPP_
#define PROMPTFORGE_BACKEND_HPP_

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptforge/error.hpp"
#include "promptforge/text.hpp"
#include "promptforge/types.hpp"

namespace promptforge {

struct MaskCandidate {
  std::string token;
  double score = 0.0;
  std::string pos;  // Penn Treebank tag of the token in the masked context

  friend bool operator==(const MaskCandidate&, const MaskCandidate&) = default;
};

// Top-K fillers for the mask, sorted by non-increasing score.
struct MaskPrediction {
  std::vector<MaskCandidate> candidates;

  friend bool operator==(const MaskPrediction&, const MaskPrediction&) = default;
};

// Pre-softmax scores of the requested tokens at the mask position.
struct MaskLogits {
  std::map<std::string, double> per_token;

  double at(const std::string& token) const {
    auto it = per_token.find(token);
    if (it == per_token.end())
      throw Error(ErrorCode::kBackendError, "backend returned no logit for '" + token + "'");
    return it->second;
  }

  friend bool operator==(const MaskLogits&, const MaskLogits&) = default;
};

struct BackendInfo {
  std::string mask_marker = "[MASK]";
  bool cased = false;
  std::string model_name;

  RenderStyle render_style() const { return {mask_marker, !cased}; }
};

// Masked language model as seen by the pipeline. Implementations must be
// safe to call from several threads at once.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendInfo handshake() = 0;
  virtual MaskPrediction fill_mask(std::string_view text, std::size_t top_k) = 0;
  virtual MaskLogits mask_logits(std::string_view text, std::span<const std::string> tokens) = 0;
};

inline void require_single_mask(std::string_view text, std::string_view marker) {
  const auto n = text::count_occurrences(text, marker);
  if (n == 0) throw Error(ErrorCode::kNoMaskInInput, "no " + std::string(marker) + " in input");
  if (n > 1)
    throw Error(ErrorCode::kMultipleMasks,
                std::to_string(n) + " occurrences of " + std::string(marker) + " in input");
}

inline void check_prediction(const MaskPrediction& p, std::size_t top_k) {
  if (p.candidates.size() > top_k)
    throw Error(ErrorCode::kBackendError, "backend returned more than top_k candidates");
  for (std::size_t i = 0; i < p.candidates.size(); ++i) {
    if (!std::isfinite(p.candidates[i].score))
      throw Error(ErrorCode::kBackendError, "non-finite candidate score");
    if (i && p.candidates[i].score > p.candidates[i - 1].score)
      throw Error(ErrorCode::kBackendError, "candidates not sorted by score");
  }
}

inline nlohmann::json to_json(const BackendInfo& i) {
  return {{"mask_marker", i.mask_marker}, {"cased", i.cased}, {"model_name", i.model_name}};
}

inline BackendInfo backend_info_from_json(const nlohmann::json& j) {
  BackendInfo info;
  info.mask_marker = j.at("mask_marker").get<std::string>();
  info.cased = j.at("cased").get<bool>();
  info.model_name = j.value("model_name", std::string{});
  if (info.mask_marker.empty()) throw Error(ErrorCode::kBackendError, "empty mask_marker");
  return info;
}

inline nlohmann::json to_json(const MaskPrediction& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : p.candidates) arr.push_back({{"token", c.token}, {"score", c.score}, {"pos", c.pos}});
  return {{"candidates", arr}};
}

inline MaskPrediction mask_prediction_from_json(const nlohmann::json& j) {
  MaskPrediction p;
  for (const auto& c : j.at("candidates"))
    p.candidates.push_back({c.at("token").get<std::string>(), c.at("score").get<double>(),
                            c.value("pos", std::string{})});
  return p;
}

inline nlohmann::json to_json(const MaskLogits& l) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [k, v] : l.per_token) obj[k] = v;
  return {{"logits", obj}};
}

inline MaskLogits mask_logits_from_json(const nlohmann::json& j) {
  MaskLogits l;
  for (const auto& [k, v] : j.at("logits").items()) {
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw Error(ErrorCode::kBackendError, "non-finite logit for '" + k + "'");
    l.per_token.emplace(k, x);
  }
  return l;
}

// A mapping whose words were each confirmed to be a single vocabulary token.
struct ValidatedMapping {
  LabelMapping mapping;
  std::vector<std::string> tokens;  // {positive word, negative word}
};

inline ValidatedMapping validate_mapping(const LabelMapping& mapping, Backend& backend) {
  const auto info = backend.handshake();
  ValidatedMapping out{mapping, {mapping.positive(), mapping.negative()}};
  for (const auto& w : out.tokens) {
    const std::string one[] = {w};
    try {
      backend.mask_logits(info.mask_marker, one);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kTokenNotInVocab)
        throw Error(ErrorCode::kMappingNotInVocab, "'" + w + "' is not a single vocabulary token");
      throw;
    }
  }
  return out;
}

}  // namespace promptforge

#endif  // PROMPTFORGE_BACKEND_HPP_
