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

#ifndef PROMPTFORGE_RANKING_HPP_
#define PROMPTFORGE_RANKING_HPP_

#include <algorithm>
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
#include "promptforge/lexicon.hpp"
#include "promptforge/parallel.hpp"
#include "promptforge/prediction.hpp"
#include "promptforge/prompt_set.hpp"
#include "promptforge/text.hpp"
#include "promptforge/types.hpp"

namespace promptforge {

// A corpus sentence containing a mapping word (or, as a fallback, one of
// its synonyms) at word position `occurrence_index`.
struct ProbeSentence {
  Sentence base;
  std::string mapping_word;  // M(y) of source_label
  std::string occurrence;    // the word as found in the sentence
  std::size_t occurrence_index = 0;
  text::WordSpan span;
  Label source_label = Label::kPositive;
  bool via_synonym = false;
};

enum class Expectation { kFlip, kSame };

inline std::string_view expectation_name(Expectation e) { return e == Expectation::kFlip ? "flip" : "same"; }

struct Perturbation {
  std::string replacement;
  Expectation expectation = Expectation::kSame;

  friend bool operator==(const Perturbation&, const Perturbation&) = default;
};

struct ProbeCase {
  ProbeSentence probe;
  std::vector<Perturbation> perturbations;
};

namespace ranking_detail {

inline bool contains_word(const std::string& s, const std::vector<text::WordSpan>& spans, std::string_view w) {
  for (const auto& sp : spans)
    if (text::iequals(std::string_view(s).substr(sp.offset, sp.length), w)) return true;
  return false;
}

}  // namespace ranking_detail

// Up to probe_limit sentences per mapping word, lowest ids first, first
// occurrence only. Sentences holding both mapping words are skipped. When
// a mapping word yields no probe, sentences with one of its first
// synonyms_per_word synonyms stand in (requires the lexicon).
inline std::vector<ProbeSentence> build_probe_set(const Corpus& corpus, const LabelMapping& mapping,
                                                  const SynonymLexicon* lexicon, const RunConfig& config) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "probe search needs a non-empty corpus");
  config.validate();
  const bool use_lexicon = config.lexicon_enabled && lexicon != nullptr;
  std::vector<ProbeSentence> probes;
  for (Label label : kLabels) {
    const std::string& word = mapping.word(label);
    const std::string& other = mapping.word(opposite(label));
    std::size_t found = 0;

    auto scan = [&](const std::vector<std::string>& targets, bool via_synonym) {
      for (const auto& s : corpus.sentences) {
        if (found >= config.probe_limit) return;
        const auto spans = text::word_spans(s.text);
        if (ranking_detail::contains_word(s.text, spans, other)) continue;
        if (via_synonym && ranking_detail::contains_word(s.text, spans, word)) continue;
        for (std::size_t i = 0; i < spans.size(); ++i) {
          const auto w = std::string_view(s.text).substr(spans[i].offset, spans[i].length);
          const bool hit = std::any_of(targets.begin(), targets.end(),
                                       [&](const std::string& t) { return text::iequals(w, t); });
          if (!hit) continue;
          probes.push_back({s, word, std::string(w), i, spans[i], label, via_synonym});
          ++found;
          break;
        }
      }
    };

    scan({word}, false);
    if (found == 0 && use_lexicon) scan(lexicon->synonyms(word, config.synonyms_per_word), true);
  }
  if (probes.empty())
    throw Error(ErrorCode::kNoProbeSentences, "no corpus sentence contains '" + mapping.positive() + "', '" +
                                                  mapping.negative() + "' or their synonyms");
  return probes;
}

// Z for one probe. With the lexicon: n synonyms of M(y) expected to keep
// the label, then M(y') and n-1 of its synonyms expected to flip it.
// Without: M(y') alone. Short synonym lists shrink Z.
inline std::vector<Perturbation> build_perturbations(const ProbeSentence& probe, const LabelMapping& mapping,
                                                     const SynonymLexicon* lexicon, const RunConfig& config) {
  config.validate();
  const std::string& other = mapping.word(opposite(probe.source_label));
  std::vector<Perturbation> out;
  if (!config.lexicon_enabled || lexicon == nullptr) {
    out.push_back({other, Expectation::kFlip});
    return out;
  }
  const std::size_t n = config.synonyms_per_word;
  const std::string found = text::to_lower(probe.occurrence);
  std::size_t same = 0;
  for (auto& w : lexicon->synonyms(probe.mapping_word, n + 1)) {
    if (same == n) break;
    if (w == found) continue;
    out.push_back({std::move(w), Expectation::kSame});
    ++same;
  }
  out.push_back({other, Expectation::kFlip});
  if (n > 1)
    for (auto& w : lexicon->synonyms(other, n - 1)) out.push_back({std::move(w), Expectation::kFlip});
  return out;
}

// The probe sentence with its occurrence replaced; a leading capital on
// the original carries over.
inline std::string apply_perturbation(const ProbeSentence& probe, const Perturbation& p) {
  std::string replacement = p.replacement;
  if (!probe.occurrence.empty() && !replacement.empty() && probe.occurrence.front() >= 'A' &&
      probe.occurrence.front() <= 'Z' && replacement.front() >= 'a' && replacement.front() <= 'z')
    replacement.front() = static_cast<char>(replacement.front() - 'a' + 'A');
  std::string out = probe.base.text;
  out.replace(probe.span.offset, probe.span.length, replacement);
  return out;
}

inline std::vector<ProbeCase> build_probe_cases(const Corpus& corpus, const LabelMapping& mapping,
                                                const SynonymLexicon* lexicon, const RunConfig& config) {
  std::vector<ProbeCase> cases;
  for (auto& probe : build_probe_set(corpus, mapping, lexicon, config)) {
    auto perturbations = build_perturbations(probe, mapping, lexicon, config);
    cases.push_back({std::move(probe), std::move(perturbations)});
  }
  return cases;
}

inline std::uint64_t max_score_of(std::span<const ProbeCase> cases) {
  std::uint64_t total = 0;
  for (const auto& c : cases) total += c.perturbations.size();
  return total;
}

// Sensitivity score: one point per perturbation where the predicted label
// flips (expectation Flip) or holds (expectation Same) relative to the
// label of the unperturbed probe. With `lenient`, a failed backend call
// costs the affected points instead of aborting.
inline ScoredPrompt score_prompt(const PromptTemplate& prompt, const Provenance& provenance,
                                 std::span<const ProbeCase> cases, Backend& backend,
                                 const ValidatedMapping& mapping, const RenderStyle& style,
                                 bool lenient = false) {
  ScoredPrompt out{prompt, provenance, 0, max_score_of(cases), 0};
  auto label_of = [&](const std::string& sentence) -> std::optional<Label> {
    try {
      return predict_one(prompt, sentence, backend, mapping, style).argmax();
    } catch (const Error&) {
      if (!lenient) throw;
      return std::nullopt;
    }
  };
  for (const auto& c : cases) {
    const auto l1 = label_of(c.probe.base.text);
    if (!l1) continue;
    for (const auto& p : c.perturbations) {
      const auto l = label_of(apply_perturbation(c.probe, p));
      if (!l) continue;
      const bool ok = p.expectation == Expectation::kFlip ? *l != *l1 : *l == *l1;
      if (ok) ++out.score;
    }
  }
  return out;
}

inline ScoredPrompt score_prompt(const PromptTemplate& prompt, std::span<const ProbeCase> cases,
                                 Backend& backend, const ValidatedMapping& mapping) {
  return score_prompt(prompt, Provenance{}, cases, backend, mapping, backend.handshake().render_style());
}

// Descending score; ties go to fewer paraphrase edits, then to the
// lexicographically smaller canonical form. Assigns ranks 1..M.
inline std::vector<ScoredPrompt> rank(std::vector<ScoredPrompt> scored) {
  std::vector<std::pair<std::string, ScoredPrompt>> keyed;
  keyed.reserve(scored.size());
  for (auto& s : scored) {
    auto form = canonical(s.prompt);
    keyed.emplace_back(std::move(form), std::move(s));
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.second.score != b.second.score) return a.second.score > b.second.score;
    if (a.second.provenance.edits() != b.second.provenance.edits())
      return a.second.provenance.edits() < b.second.provenance.edits();
    return a.first < b.first;
  });
  std::vector<ScoredPrompt> out;
  out.reserve(keyed.size());
  for (auto& [form, s] : keyed) {
    s.rank = out.size() + 1;
    out.push_back(std::move(s));
  }
  return out;
}

struct ScoringFailure {
  std::string canonical;
  std::string message;
};

struct RankingResult {
  std::vector<ScoredPrompt> ranked;
  std::vector<ScoringFailure> failures;
  std::size_t probe_count = 0;
  std::uint64_t max_score = 0;
};

// Scores every candidate (in parallel across prompts) and ranks the ones
// that scored successfully. A backend failure drops only that prompt.
inline RankingResult rank_candidates(const CandidateSet& candidates, std::span<const ProbeCase> cases,
                                     Backend& backend, const ValidatedMapping& mapping, unsigned workers = 1,
                                     bool lenient = false) {
  if (candidates.empty()) throw Error(ErrorCode::kInvalidArgument, "no candidate prompts to rank");
  const auto style = backend.handshake().render_style();
  std::vector<std::optional<ScoredPrompt>> scored(candidates.size());
  std::vector<std::string> errors(candidates.size());
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    const auto& c = candidates.candidates[i];
    try {
      scored[i] = score_prompt(c.prompt, c.provenance, cases, backend, mapping, style, lenient);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  RankingResult result;
  result.probe_count = cases.size();
  result.max_score = max_score_of(cases);
  std::vector<ScoredPrompt> ok;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (scored[i])
      ok.push_back(std::move(*scored[i]));
    else
      result.failures.push_back({canonical(candidates.candidates[i].prompt), errors[i]});
  }
  result.ranked = rank(std::move(ok));
  return result;
}

}  // namespace promptforge

#endif  // PROMPTFORGE_RANKING_HPP_
