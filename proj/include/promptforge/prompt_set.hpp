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

#ifndef PROMPTFORGE_PROMPT_SET_HPP_
#define PROMPTFORGE_PROMPT_SET_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "promptforge/error.hpp"
#include "promptforge/types.hpp"

namespace promptforge {

enum class Origin { kBase = 0, kPositioned = 1, kSubordinated = 2, kParaphrased = 3 };

inline std::string_view origin_name(Origin o) {
  switch (o) {
    case Origin::kBase: return "base";
    case Origin::kPositioned: return "positioned";
    case Origin::kSubordinated: return "subordinated";
    case Origin::kParaphrased: return "paraphrased";
  }
  return "unknown";
}

inline Origin parse_origin(std::string_view s) {
  if (s == "base") return Origin::kBase;
  if (s == "positioned") return Origin::kPositioned;
  if (s == "subordinated") return Origin::kSubordinated;
  if (s == "paraphrased") return Origin::kParaphrased;
  throw Error(ErrorCode::kParseError, "unknown origin '" + std::string(s) + "'");
}

struct TokenSwap {
  std::size_t index = 0;
  std::string old_word;
  std::string new_word;
  double score = 0.0;  // summed fill-mask score of new_word

  friend bool operator==(const TokenSwap&, const TokenSwap&) = default;
};

struct Provenance {
  Origin origin = Origin::kBase;
  std::optional<TokenSwap> replaced_token;

  std::size_t edits() const { return replaced_token ? 1 : 0; }

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct Candidate {
  PromptTemplate prompt;
  Provenance provenance;
};

struct CandidateSet {
  std::vector<Candidate> candidates;

  std::size_t size() const { return candidates.size(); }
  bool empty() const { return candidates.empty(); }
};

struct ScoredPrompt {
  PromptTemplate prompt;
  Provenance provenance;
  std::uint64_t score = 0;
  std::uint64_t max_score = 0;
  std::size_t rank = 0;  // 1-based
};

inline nlohmann::json to_json(const Provenance& p) {
  nlohmann::json j = {{"origin", origin_name(p.origin)}};
  if (p.replaced_token) {
    const auto& s = *p.replaced_token;
    j["replaced_token"] = {{"index", s.index}, {"old", s.old_word}, {"new", s.new_word}, {"score", s.score}};
  } else {
    j["replaced_token"] = nullptr;
  }
  return j;
}

inline Provenance provenance_from_json(const nlohmann::json& j) {
  Provenance p;
  p.origin = parse_origin(j.at("origin").get<std::string>());
  if (j.contains("replaced_token") && !j.at("replaced_token").is_null()) {
    const auto& r = j.at("replaced_token");
    p.replaced_token = TokenSwap{r.at("index").get<std::size_t>(), r.at("old").get<std::string>(),
                                 r.at("new").get<std::string>(), r.value("score", 0.0)};
  }
  return p;
}

inline nlohmann::json to_json(const CandidateSet& set) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : set.candidates)
    arr.push_back({{"canonical", canonical(c.prompt)},
                   {"template", to_json(c.prompt)},
                   {"provenance", to_json(c.provenance)}});
  return arr;
}

inline CandidateSet candidate_set_from_json(const nlohmann::json& arr) {
  CandidateSet set;
  try {
    for (const auto& c : arr)
      set.candidates.push_back({template_from_json(c.at("template")), provenance_from_json(c.at("provenance"))});
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("candidate set: ") + e.what());
  }
  return set;
}

inline nlohmann::json to_json(const ScoredPrompt& s) {
  return {{"rank", s.rank},
          {"canonical", canonical(s.prompt)},
          {"origin", origin_name(s.provenance.origin)},
          {"score", s.score},
          {"max_score", s.max_score},
          {"template", to_json(s.prompt)},
          {"provenance", to_json(s.provenance)}};
}

inline ScoredPrompt scored_prompt_from_json(const nlohmann::json& j) {
  try {
    return {template_from_json(j.at("template")), provenance_from_json(j.at("provenance")),
            j.at("score").get<std::uint64_t>(), j.at("max_score").get<std::uint64_t>(),
            j.at("rank").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("ranked prompt: ") + e.what());
  }
}

}  // namespace promptforge

#endif  // PROMPTFORGE_PROMPT_SET_HPP_
