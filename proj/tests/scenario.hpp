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

#ifndef PROMPTFORGE_TESTS_SCENARIO_HPP_
#define PROMPTFORGE_TESTS_SCENARIO_HPP_

// Constructed scenarios shared by the unit and acceptance suites. Expected
// ranking scores come from a brute-force pass that builds every perturbed
// sentence and rendered prompt by hand and applies the zero-one checks
// directly. Nothing here calls the library's probe, perturbation or
// scoring code.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "promptforge/backend.hpp"
#include "promptforge/prompt_set.hpp"
#include "promptforge/types.hpp"
#include "test_util.hpp"

namespace promptforge::testing {

struct PromptSpec {
  std::string (*layout)(const std::string&, const std::string&);
  std::string words;  // prompt text with "[MASK]"
  std::string spec() const { return layout("<sentence>", words); }
};

inline const std::map<std::string, std::vector<std::string>>& scenario_synonyms() {
  static const std::map<std::string, std::vector<std::string>> syn = {
      {"great", {"outstanding", "bully", "corking", "cracking", "dandy", "groovy", "keen"}},
      {"terrible", {"awful", "dire", "direful", "dread", "dreaded", "dreadful", "fearful"}},
  };
  return syn;
}

// Three probes: two for "great", one for "terrible".
inline std::vector<std::string> scenario_corpus() {
  return {"battery life was great", "the screen is great and bright", "service was terrible", "nothing to see"};
}

inline std::vector<PromptSpec> scenario_prompts() {
  return {{after_dot, "it was [MASK]"},          {before_dot, "it was [MASK]"},
          {before_because, "it was [MASK]"},     {after_so, "it was [MASK]"},
          {after_dot, "the sentence was [MASK]"}, {before_dot, "this is [MASK]"},
          {after_dot, "overall [MASK]"},          {before_because, "the review was [MASK]"},
          {after_so, "all in all [MASK]"},        {after_dot, "the statement seemed [MASK]"}};
}

struct ProbeOracleCase {
  std::string sentence;
  std::string source_word;
  std::vector<std::pair<std::string, bool>> perturbed;  // text, expect flip
};

// Same: first 6 synonyms of the found word. Flip: the opposite word and
// the first 5 of its synonyms.
inline std::vector<ProbeOracleCase> scenario_probe_cases() {
  const auto& syn = scenario_synonyms();
  std::vector<ProbeOracleCase> out;
  for (const auto& s : scenario_corpus()) {
    std::istringstream in(s);
    std::vector<std::string> words;
    for (std::string w; in >> w;) words.push_back(w);
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (words[i] != "great" && words[i] != "terrible") continue;
      const std::string self = words[i];
      const std::string other = self == "great" ? "terrible" : "great";
      auto with = [&](const std::string& r) {
        auto copy = words;
        copy[i] = r;
        std::string t;
        for (std::size_t k = 0; k < copy.size(); ++k) t += (k ? " " : "") + copy[k];
        return t;
      };
      ProbeOracleCase c{s, self, {}};
      for (int k = 0; k < 6; ++k) c.perturbed.push_back({with(syn.at(self)[k]), false});
      c.perturbed.push_back({with(other), true});
      for (int k = 0; k < 5; ++k) c.perturbed.push_back({with(syn.at(other)[k]), true});
      out.push_back(c);
      break;
    }
  }
  return out;
}

struct ScoringScenario {
  std::vector<PromptSpec> prompts;
  nlohmann::json fixture;
  std::vector<std::uint64_t> expected_scores;  // per prompt, brute force
  std::uint64_t max_score = 0;
};

inline nlohmann::json scenario_lexicon_json() {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [k, v] : scenario_synonyms()) entries[k] = v;
  return {{"version", 1}, {"entries", entries}};
}

// Logits come from `logit_of(prompt index, sentence)` as (great, terrible).
inline ScoringScenario build_scenario(
    const std::function<std::pair<double, double>(std::size_t, const std::string&)>& logit_of) {
  ScoringScenario sc;
  sc.prompts = scenario_prompts();
  const auto cases = scenario_probe_cases();
  nlohmann::json logits = nlohmann::json::object();
  for (std::size_t p = 0; p < sc.prompts.size(); ++p) {
    const auto& spec = sc.prompts[p];
    auto positive = [&](const std::string& sentence) {
      const auto [g, t] = logit_of(p, sentence);
      logits[spec.layout(sentence, spec.words)] = {{"great", g}, {"terrible", t}};
      return g >= t;  // ties resolve to Positive
    };
    std::uint64_t score = 0;
    for (const auto& c : cases) {
      const bool l1 = positive(c.sentence);
      for (const auto& [text, flip] : c.perturbed) {
        const bool l = positive(text);
        if (flip ? l != l1 : l == l1) ++score;
      }
    }
    sc.expected_scores.push_back(score);
  }
  for (const auto& c : cases) sc.max_score += c.perturbed.size();
  sc.fixture = {{"mask_logits", logits}};
  return sc;
}

// Hand-set logits drawn from a small integer grid so ties occur.
inline ScoringScenario random_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::map<std::pair<std::size_t, std::string>, std::pair<double, double>> memo;
  return build_scenario([&](std::size_t p, const std::string& s) {
    auto key = std::make_pair(p, s);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const double g = static_cast<double>(rng() % 5) - 2.0;
    const double t = static_cast<double>(rng() % 5) - 2.0;
    return memo[key] = {g, t};
  });
}

inline bool mentions_positive(const std::string& s) {
  const auto& syn = scenario_synonyms().at("great");
  std::istringstream in(s);
  for (std::string w; in >> w;)
    if (w == "great" || std::find(syn.begin(), syn.end(), w) != syn.end()) return true;
  return false;
}

// Prompt 0 tracks sentiment perfectly (scores max). Prompt 9 always says
// Positive, so it earns exactly the Same checks of the "great" probes plus
// none of the Flip checks. Every other prompt reacts to the bare mapping
// words only and lands strictly in between.
inline ScoringScenario validity_scenario() {
  return build_scenario([](std::size_t p, const std::string& s) -> std::pair<double, double> {
    if (p == 0) return mentions_positive(s) ? std::pair{3.0, -1.0} : std::pair{-1.0, 3.0};
    if (p == 9) return {1.0, 0.0};
    return s.find("great") != std::string::npos ? std::pair{1.0, 0.0} : std::pair{0.0, 1.0};
  });
}

// Three ranked prompts (scores 10, 6, 4) over four sentences with
// hand-set logits. Gold labels: positive, negative, negative, positive.
struct ThreePromptFixture {
  std::vector<ScoredPrompt> ranked;
  Corpus corpus = Corpus::from_texts({"fine food", "cold soup", "ok", "meh"});
  nlohmann::json fixture;
  std::vector<Label> gold = {Label::kPositive, Label::kNegative, Label::kNegative, Label::kPositive};

  ThreePromptFixture() {
    const std::vector<std::pair<std::string (*)(const std::string&, const std::string&), std::string>> prompts = {
        {after_dot, "it was [MASK]"}, {before_dot, "this is [MASK]"}, {after_so, "it was [MASK]"}};
    const std::uint64_t scores[] = {10, 6, 4};
    const std::map<std::string, std::vector<std::pair<double, double>>> logits = {
        {"fine food", {{2, 0}, {1, 1}, {0.5, -0.5}}},
        {"cold soup", {{-1, 1}, {0, 2}, {1, 0}}},
        {"ok", {{0, 0}, {0, 0}, {0, 0}}},
        {"meh", {{0.2, 0}, {-1, 0}, {0.3, 0.1}}}};
    nlohmann::json table = nlohmann::json::object();
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      const auto& [layout, words] = prompts[i];
      ranked.push_back({parse_prompt(layout("<sentence>", words)), {}, scores[i], 20, i + 1});
      for (const auto& [s, row] : logits) table[layout(s, words)] = {{"great", row[i].first}, {"terrible", row[i].second}};
    }
    fixture = {{"mask_logits", table}};
  }
};

// Proposes every vocabulary word, all with the same tag, scored by a hash
// of the request so different contexts rank them differently.
class EverythingBackend final : public Backend {
 public:
  explicit EverythingBackend(std::vector<std::string> vocab) : vocab_(std::move(vocab)) {}
  BackendInfo handshake() override { return {"[MASK]", false, "everything"}; }
  MaskPrediction fill_mask(std::string_view text, std::size_t top_k) override {
    require_single_mask(text, "[MASK]");
    MaskPrediction p;
    std::size_t h = std::hash<std::string_view>{}(text);
    for (const auto& w : vocab_) {
      h = h * 1099511628211ULL + 7;
      p.candidates.push_back({w, static_cast<double>(h % 1000) / 1000.0, "NN"});
    }
    std::stable_sort(p.candidates.begin(), p.candidates.end(),
                     [](const auto& a, const auto& b) { return a.score > b.score; });
    if (p.candidates.size() > top_k) p.candidates.resize(top_k);
    return p;
  }
  MaskLogits mask_logits(std::string_view, std::span<const std::string> tokens) override {
    MaskLogits l;
    for (const auto& t : tokens) l.per_token[t] = 0.0;
    return l;
  }

 private:
  std::vector<std::string> vocab_;
};

}  // namespace promptforge::testing

#endif  // PROMPTFORGE_TESTS_SCENARIO_HPP_
