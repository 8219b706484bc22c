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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"

#include "promptforge/fixture_backend.hpp"
#include "promptforge/ranking.hpp"
#include "scenario.hpp"
#include "test_util.hpp"

namespace pf = promptforge;
namespace pt = promptforge::testing;
using nlohmann::json;
using pf::Expectation;
using pf::Perturbation;

namespace {

const pf::LabelMapping kMapping("great", "terrible");

pf::SynonymLexicon scenario_lexicon() { return pf::SynonymLexicon::from_json(pt::scenario_lexicon_json()); }

pf::CandidateSet candidates_of(const std::vector<pt::PromptSpec>& specs) {
  pf::CandidateSet set;
  for (const auto& s : specs) set.candidates.push_back({pf::parse_prompt(s.spec()), {}});
  return set;
}

std::vector<pf::ProbeCase> scenario_cases(const pf::RunConfig& config = {}) {
  const auto lex = scenario_lexicon();
  return pf::build_probe_cases(pf::Corpus::from_texts(pt::scenario_corpus()), kMapping, &lex, config);
}

std::vector<std::uint64_t> library_scores(const pt::ScoringScenario& sc) {
  auto backend = pf::fixture_from_json(sc.fixture);
  const auto cases = scenario_cases();
  const auto mapping = pf::validate_mapping(kMapping, *backend);
  const auto set = candidates_of(sc.prompts);
  const auto style = backend->handshake().render_style();
  std::vector<std::uint64_t> out;
  for (const auto& c : set.candidates)
    out.push_back(pf::score_prompt(c.prompt, c.provenance, cases, *backend, mapping, style).score);
  return out;
}

pf::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const pf::Error& e) {
    return e.code();
  }
  return pf::ErrorCode::kInternal;
}

// Fails any mask-logits request whose text contains `poison`.
class PoisonedBackend final : public pf::Backend {
 public:
  PoisonedBackend(pf::Backend& inner, std::string poison) : inner_(inner), poison_(std::move(poison)) {}
  pf::BackendInfo handshake() override { return inner_.handshake(); }
  pf::MaskPrediction fill_mask(std::string_view text, std::size_t k) override { return inner_.fill_mask(text, k); }
  pf::MaskLogits mask_logits(std::string_view text, std::span<const std::string> tokens) override {
    if (text.find(poison_) != std::string_view::npos) throw pf::Error(pf::ErrorCode::kBackendError, "poisoned");
    return inner_.mask_logits(text, tokens);
  }

 private:
  pf::Backend& inner_;
  std::string poison_;
};

}  // namespace

TEST(ProbeSet, SingleSentenceExample) {
  pf::SynonymLexicon empty;
  const auto probes =
      pf::build_probe_set(pf::Corpus::from_texts({"battery life was great"}), kMapping, &empty, pf::RunConfig{});
  ASSERT_EQ(probes.size(), 1u);
  EXPECT_EQ(probes[0].mapping_word, "great");
  EXPECT_EQ(probes[0].occurrence_index, 3u);
  EXPECT_EQ(probes[0].source_label, pf::Label::kPositive);
  EXPECT_FALSE(probes[0].via_synonym);
}

TEST(ProbeSet, LimitKeepsLowestIds) {
  std::vector<std::string> texts;
  for (int i = 0; i < 10; ++i) texts.push_back("item " + std::to_string(i) + " was great");
  pf::RunConfig config;
  config.probe_limit = 2;
  const auto probes = pf::build_probe_set(pf::Corpus::from_texts(texts), kMapping, nullptr, config);
  ASSERT_EQ(probes.size(), 2u);
  EXPECT_EQ(probes[0].base.id, 0u);
  EXPECT_EQ(probes[1].base.id, 1u);
}

TEST(ProbeSet, WholeWordCaseInsensitive) {
  const auto probes = pf::build_probe_set(
      pf::Corpus::from_texts({"greatness abounds", "It was GREAT, really", "ungreat"}), kMapping, nullptr, {});
  ASSERT_EQ(probes.size(), 1u);
  EXPECT_EQ(probes[0].base.id, 1u);
  EXPECT_EQ(probes[0].occurrence, "GREAT");
}

TEST(ProbeSet, FirstOccurrenceOnly) {
  const auto probes = pf::build_probe_set(pf::Corpus::from_texts({"great food , great view"}), kMapping, nullptr, {});
  ASSERT_EQ(probes.size(), 1u);
  EXPECT_EQ(probes[0].occurrence_index, 0u);
}

TEST(ProbeSet, BothMappingWordsExcluded) {
  EXPECT_EQ(code_of([] {
              pf::build_probe_set(pf::Corpus::from_texts({"great start , terrible end"}), kMapping, nullptr, {});
            }),
            pf::ErrorCode::kNoProbeSentences);
}

TEST(ProbeSet, NoMatchesIsError) {
  pf::SynonymLexicon empty;
  EXPECT_EQ(code_of([&] { pf::build_probe_set(pf::Corpus::from_texts({"nothing here"}), kMapping, &empty, {}); }),
            pf::ErrorCode::kNoProbeSentences);
  EXPECT_EQ(code_of([&] { pf::build_probe_set(pf::Corpus{}, kMapping, &empty, {}); }), pf::ErrorCode::kEmptyCorpus);
}

TEST(ProbeSet, SynonymFallback) {
  const auto lex = scenario_lexicon();
  const auto corpus = pf::Corpus::from_texts({"the food was great", "service was awful"});
  const auto probes = pf::build_probe_set(corpus, kMapping, &lex, {});
  ASSERT_EQ(probes.size(), 2u);
  EXPECT_EQ(probes[1].source_label, pf::Label::kNegative);
  EXPECT_TRUE(probes[1].via_synonym);
  EXPECT_EQ(probes[1].occurrence, "awful");
  EXPECT_EQ(probes[1].mapping_word, "terrible");

  pf::RunConfig off;
  off.lexicon_enabled = false;
  EXPECT_EQ(pf::build_probe_set(corpus, kMapping, &lex, off).size(), 1u);
}

TEST(Perturbations, DefaultTwelve) {
  const auto lex = scenario_lexicon();
  const auto probes = pf::build_probe_set(pf::Corpus::from_texts({"battery life was great"}), kMapping, &lex, {});
  const auto z = pf::build_perturbations(probes[0], kMapping, &lex, {});
  const std::vector<Perturbation> expected = {
      {"outstanding", Expectation::kSame}, {"bully", Expectation::kSame},  {"corking", Expectation::kSame},
      {"cracking", Expectation::kSame},    {"dandy", Expectation::kSame},  {"groovy", Expectation::kSame},
      {"terrible", Expectation::kFlip},    {"awful", Expectation::kFlip},  {"dire", Expectation::kFlip},
      {"direful", Expectation::kFlip},     {"dread", Expectation::kFlip},  {"dreaded", Expectation::kFlip}};
  EXPECT_EQ(z, expected);
}

TEST(Perturbations, LexiconDisabled) {
  const auto lex = scenario_lexicon();
  pf::RunConfig off;
  off.lexicon_enabled = false;
  const auto probes = pf::build_probe_set(pf::Corpus::from_texts({"battery life was great"}), kMapping, &lex, off);
  EXPECT_EQ(pf::build_perturbations(probes[0], kMapping, &lex, off),
            (std::vector<Perturbation>{{"terrible", Expectation::kFlip}}));
}

TEST(Perturbations, ShortListShrinks) {
  const pf::SynonymLexicon lex(std::map<std::string, std::vector<std::string>>{
      {"great", {"swell", "big"}}, {"terrible", {"awful", "dire", "dread", "dreadful", "fearful", "frightful"}}});
  const auto probes = pf::build_probe_set(pf::Corpus::from_texts({"it was great"}), kMapping, &lex, {});
  const auto z = pf::build_perturbations(probes[0], kMapping, &lex, {});
  ASSERT_EQ(z.size(), 8u);
  EXPECT_EQ(std::count_if(z.begin(), z.end(), [](const auto& p) { return p.expectation == Expectation::kSame; }), 2);
  const std::vector<pf::ProbeCase> cases = {{probes[0], z}};
  EXPECT_EQ(pf::max_score_of(cases), 8u);
}

TEST(Perturbations, FoundSynonymNotReused) {
  const auto lex = scenario_lexicon();
  const auto probes = pf::build_probe_set(pf::Corpus::from_texts({"service was awful"}), kMapping, &lex, {});
  const auto z = pf::build_perturbations(probes[0], kMapping, &lex, {});
  ASSERT_EQ(z.size(), 12u);
  EXPECT_EQ(z[0], (Perturbation{"dire", Expectation::kSame}));
  EXPECT_EQ(z[5], (Perturbation{"fearful", Expectation::kSame}));
  EXPECT_EQ(z[6], (Perturbation{"great", Expectation::kFlip}));
}

TEST(Perturbations, ApplyCarriesCapital) {
  const auto probes = pf::build_probe_set(pf::Corpus::from_texts({"Great battery, honestly."}), kMapping, nullptr, {});
  EXPECT_EQ(pf::apply_perturbation(probes[0], {"terrible", Expectation::kFlip}), "Terrible battery, honestly.");
}

TEST(Score, SingleFlipAndSameChecks) {
  const std::string s = "battery life was great";
  const std::string flipped = "battery life was terrible";
  const auto prompt = pf::parse_prompt("<sentence> . it was [MASK] .");
  json logits = {{pt::after_dot(s, "it was [MASK]"), {{"great", 2}, {"terrible", 0}}},
                 {pt::after_dot(flipped, "it was [MASK]"), {{"great", 0}, {"terrible", 2}}}};
  auto backend = pf::fixture_from_json({{"mask_logits", logits}});
  const auto mapping = pf::validate_mapping(kMapping, *backend);
  const auto probes = pf::build_probe_set(pf::Corpus::from_texts({s}), kMapping, nullptr, {});

  const std::vector<pf::ProbeCase> flip = {{probes[0], {{"terrible", Expectation::kFlip}}}};
  EXPECT_EQ(pf::score_prompt(prompt, flip, *backend, mapping).score, 1u);
  const std::vector<pf::ProbeCase> same = {{probes[0], {{"terrible", Expectation::kSame}}}};
  EXPECT_EQ(pf::score_prompt(prompt, same, *backend, mapping).score, 0u);
  const std::vector<pf::ProbeCase> same_hit = {{probes[0], {{"great", Expectation::kSame}}}};
  EXPECT_EQ(pf::score_prompt(prompt, same_hit, *backend, mapping).score, 1u);
}

TEST(ScoreOracle, ScenarioShape) {
  const auto cases = scenario_cases();
  ASSERT_EQ(cases.size(), 3u);
  EXPECT_EQ(pf::max_score_of(cases), 36u);
}

// Brute-force scores for seed 2026, frozen.
TEST(ScoreOracle, FrozenSeed) {
  const auto sc = pt::random_scenario(2026);
  const std::vector<std::uint64_t> frozen = {16, 22, 18, 21, 16, 21, 14, 17, 20, 18};
  EXPECT_EQ(sc.expected_scores, frozen);
  EXPECT_EQ(library_scores(sc), frozen);
}

TEST(ScoreOracle, MatchesBruteForceAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const auto sc = pt::random_scenario(seed);
    EXPECT_EQ(library_scores(sc), sc.expected_scores) << "seed " << seed;
  }
}

// Any strictly increasing map applied to both logits keeps every argmax,
// so scores cannot move.
TEST(ScoreOracle, InvariantUnderMonotoneLogitTransform) {
  const auto sc = pt::random_scenario(77);
  for (auto f : {+[](double x) { return 3.0 * x + 1.0; }, +[](double x) { return std::exp(x); },
                 +[](double x) { return x * x * x - 10.0; }}) {
    auto moved = sc;
    for (auto& [text, row] : moved.fixture["mask_logits"].items())
      for (auto& [tok, v] : row.items()) v = f(v.get<double>());
    EXPECT_EQ(library_scores(moved), sc.expected_scores);
  }
}

// Swapping every expectation turns passes into failures and back.
TEST(ScoreOracle, ComplementPartitionsMaxScore) {
  const auto sc = pt::random_scenario(9);
  auto backend = pf::fixture_from_json(sc.fixture);
  const auto mapping = pf::validate_mapping(kMapping, *backend);
  auto cases = scenario_cases();
  auto inverted = cases;
  for (auto& c : inverted)
    for (auto& p : c.perturbations)
      p.expectation = p.expectation == Expectation::kFlip ? Expectation::kSame : Expectation::kFlip;
  for (const auto& spec : sc.prompts) {
    const auto prompt = pf::parse_prompt(spec.spec());
    const auto pass = pf::score_prompt(prompt, cases, *backend, mapping).score;
    const auto fail = pf::score_prompt(prompt, inverted, *backend, mapping).score;
    EXPECT_EQ(pass + fail, pf::max_score_of(cases));
  }
}

TEST(ScoreOracle, LexiconOffNeverRaisesMaxScore) {
  const auto lex = scenario_lexicon();
  const auto corpus = pf::Corpus::from_texts(pt::scenario_corpus());
  pf::RunConfig off;
  off.lexicon_enabled = false;
  const auto with = pf::build_probe_cases(corpus, kMapping, &lex, {});
  const auto without = pf::build_probe_cases(corpus, kMapping, &lex, off);
  EXPECT_LE(pf::max_score_of(without), pf::max_score_of(with));
  EXPECT_EQ(pf::max_score_of(without), 3u);
}

TEST(Rank, OrdersByScore) {
  const auto p = pf::parse_prompt("it was [MASK]");
  const auto q = pf::parse_prompt("this is [MASK]");
  const auto ranked = pf::rank({{p, {}, 7, 12, 0}, {q, {}, 10, 12, 0}});
  EXPECT_EQ(ranked[0].score, 10u);
  EXPECT_EQ(ranked[0].rank, 1u);
  EXPECT_EQ(ranked[1].rank, 2u);
}

TEST(Rank, TieGoesToFewerEditsThenCanonical) {
  const auto base = pf::parse_prompt("zz was [MASK]");
  const auto para = pf::parse_prompt("aa was [MASK]");
  const pf::Provenance swapped{pf::Origin::kParaphrased, pf::TokenSwap{0, "zz", "aa", 1.0}};
  const auto ranked = pf::rank({{para, swapped, 5, 12, 0}, {base, {}, 5, 12, 0}});
  EXPECT_EQ(pf::canonical(ranked[0].prompt), pf::canonical(base));

  const auto b = pf::parse_prompt("bb was [MASK]");
  const auto a = pf::parse_prompt("ab was [MASK]");
  const auto r2 = pf::rank({{b, {}, 5, 12, 0}, {a, {}, 5, 12, 0}});
  EXPECT_EQ(pf::canonical(r2[0].prompt), pf::canonical(a));
}

TEST(Rank, PermutationInvariant) {
  const auto sc = pt::random_scenario(31);
  auto backend = pf::fixture_from_json(sc.fixture);
  const auto mapping = pf::validate_mapping(kMapping, *backend);
  const auto cases = scenario_cases();
  auto set = candidates_of(sc.prompts);
  const auto reference = pf::rank_candidates(set, cases, *backend, mapping, 1);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(set.candidates.begin(), set.candidates.end(), rng);
    const auto again = pf::rank_candidates(set, cases, *backend, mapping, 4);
    ASSERT_EQ(again.ranked.size(), reference.ranked.size());
    for (std::size_t i = 0; i < again.ranked.size(); ++i) {
      EXPECT_EQ(pf::canonical(again.ranked[i].prompt), pf::canonical(reference.ranked[i].prompt));
      EXPECT_EQ(again.ranked[i].score, reference.ranked[i].score);
      EXPECT_EQ(again.ranked[i].rank, i + 1);
    }
  }
}

TEST(Rank, ValidityScenario) {
  const auto sc = pt::validity_scenario();
  EXPECT_EQ(sc.expected_scores.front(), 36u);
  EXPECT_EQ(sc.expected_scores.back(), 18u);
  auto backend = pf::fixture_from_json(sc.fixture);
  const auto mapping = pf::validate_mapping(kMapping, *backend);
  const auto result = pf::rank_candidates(candidates_of(sc.prompts), scenario_cases(), *backend, mapping, 2);
  ASSERT_EQ(result.ranked.size(), 10u);
  EXPECT_EQ(pf::canonical(result.ranked.front().prompt), pf::canonical(pf::parse_prompt(sc.prompts[0].spec())));
  EXPECT_EQ(result.ranked.front().score, result.max_score);
  EXPECT_EQ(pf::canonical(result.ranked.back().prompt), pf::canonical(pf::parse_prompt(sc.prompts[9].spec())));
  EXPECT_EQ(result.ranked.back().score, 18u);  // the 3 x 6 Same checks
}

TEST(Rank, BackendFailureDropsOnlyThatPrompt) {
  const auto sc = pt::random_scenario(4);
  auto fixture = pf::fixture_from_json(sc.fixture);
  PoisonedBackend backend(*fixture, "all in all");
  const auto mapping = pf::validate_mapping(kMapping, backend);
  const auto result = pf::rank_candidates(candidates_of(sc.prompts), scenario_cases(), backend, mapping, 3);
  EXPECT_EQ(result.ranked.size(), 9u);
  ASSERT_EQ(result.failures.size(), 1u);
  EXPECT_EQ(result.failures[0].canonical, "<sentence> so all in all [MASK] .");
}

TEST(Rank, LenientCountsFailedChecksAsZero) {
  const auto sc = pt::random_scenario(4);
  auto fixture = pf::fixture_from_json(sc.fixture);
  PoisonedBackend backend(*fixture, "dire");
  const auto mapping = pf::validate_mapping(kMapping, backend);
  const auto cases = scenario_cases();
  const auto prompt = pf::parse_prompt(sc.prompts[0].spec());
  const auto style = backend.handshake().render_style();
  EXPECT_EQ(code_of([&] { pf::score_prompt(prompt, {}, cases, backend, mapping, style, false); }),
            pf::ErrorCode::kBackendError);
  const auto lenient = pf::score_prompt(prompt, {}, cases, backend, mapping, style, true);
  EXPECT_LE(lenient.score, sc.expected_scores[0]);
  EXPECT_EQ(lenient.max_score, 36u);
}

TEST(Rank, EmptyCandidateSet) {
  auto backend = pf::fixture_from_json(json::object());
  const auto mapping = pf::validate_mapping(kMapping, *backend);
  EXPECT_EQ(code_of([&] { pf::rank_candidates({}, scenario_cases(), *backend, mapping); }),
            pf::ErrorCode::kInvalidArgument);
}
