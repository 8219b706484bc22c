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

#ifndef PROMPTFORGE_AUGMENTATION_HPP_
#define PROMPTFORGE_AUGMENTATION_HPP_

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <map>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "promptforge/backend.hpp"
#include "promptforge/error.hpp"
#include "promptforge/parallel.hpp"
#include "promptforge/prompt_set.hpp"
#include "promptforge/text.hpp"
#include "promptforge/types.hpp"

namespace promptforge {

struct Layout {
  Position position;
  Conjunction conjunction;
};

// Every legal (position, conjunction) pair, in output order.
inline constexpr std::array<Layout, 4> kLayouts = {{
    {Position::kAfterSentence, Conjunction::kNone},
    {Position::kBeforeSentence, Conjunction::kNone},
    {Position::kBeforeSentence, Conjunction::kBecause},
    {Position::kAfterSentence, Conjunction::kSo},
}};

inline std::vector<PromptTemplate> positional_variants(const PromptTemplate& t) {
  return {t.with_layout(Position::kAfterSentence, Conjunction::kNone),
          t.with_layout(Position::kBeforeSentence, Conjunction::kNone)};
}

inline std::vector<PromptTemplate> subordinate_variants(const PromptTemplate& t) {
  return {t.with_layout(Position::kBeforeSentence, Conjunction::kBecause),
          t.with_layout(Position::kAfterSentence, Conjunction::kSo)};
}

inline bool is_determiner(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

// Word positions a paraphrase may swap: everything but the mask and
// determiners.
inline std::vector<std::size_t> replaceable_positions(const PromptTemplate& t) {
  std::vector<std::size_t> out;
  const auto& segs = t.segments();
  for (std::size_t i = 0; i < segs.size(); ++i)
    if (!segs[i].is_mask() && !is_determiner(segs[i].word)) out.push_back(i);
  return out;
}

namespace augmentation_detail {

inline bool word_like(std::string_view token, std::string_view mask_marker) {
  if (token.empty() || token.starts_with("##")) return false;
  if (token.find(mask_marker) != std::string_view::npos) return false;
  bool letter = false;
  for (char c : token) {
    if (!text::is_word_char(c)) return false;
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) letter = true;
  }
  return letter;
}

}  // namespace augmentation_detail

struct ParaphraseStats {
  std::size_t queries = 0;
  std::size_t untagged = 0;      // original token missing from the top-K, sample skipped
  std::size_t pos_rejected = 0;  // candidates dropped for a POS mismatch
};

struct Paraphrase {
  PromptTemplate prompt;
  TokenSwap swap;
};

// Single-token paraphrases of `t`. For each replaceable word, a seeded
// sample of corpus sentences is rendered with the positive mapping word in
// the mask slot and that word masked; fill-mask candidates with the same
// POS tag as the original word are pooled across samples by summed score.
// Ordered by word position, then summed score (descending), then token.
inline std::vector<Paraphrase> paraphrase_candidates(const PromptTemplate& t, const Corpus& corpus,
                                                     Backend& backend, const LabelMapping& mapping,
                                                     const RunConfig& config, unsigned workers = 1,
                                                     ParaphraseStats* stats = nullptr) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "paraphrasing needs at least one corpus sentence");
  config.validate();
  const auto style = backend.handshake().render_style();
  const auto positions = replaceable_positions(t);

  std::mt19937_64 rng(config.random_seed);
  struct Job {
    std::size_t position;
    std::size_t sentence;
  };
  std::vector<Job> jobs;
  for (auto pos : positions)
    for (auto idx : sample_indices(rng, corpus.size(), config.sample_instances)) jobs.push_back({pos, idx});

  struct JobResult {
    std::vector<std::pair<std::string, double>> kept;
    bool untagged = false;
    std::size_t rejected = 0;
  };
  std::vector<JobResult> results(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto& job = jobs[j];
    const std::string& original = t.segments()[job.position].word;
    const auto text = render_masked_word(t, corpus.sentences[job.sentence].text, mapping.positive(),
                                         job.position, style);
    const auto pred = backend.fill_mask(text, config.paraphrase_top_k);
    auto& r = results[j];
    const MaskCandidate* self = nullptr;
    for (const auto& c : pred.candidates)
      if (text::to_lower(c.token) == original) {
        self = &c;
        break;
      }
    if (!self) {
      r.untagged = true;
      return;
    }
    for (const auto& c : pred.candidates) {
      std::string token = text::to_lower(c.token);
      if (token == original || !augmentation_detail::word_like(token, style.mask_marker)) continue;
      if (c.pos != self->pos) {
        ++r.rejected;
        continue;
      }
      r.kept.emplace_back(std::move(token), c.score);
    }
  });

  // Summation runs in job order so totals do not depend on scheduling.
  std::map<std::size_t, std::map<std::string, double>> pooled;
  ParaphraseStats local;
  local.queries = jobs.size();
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (results[j].untagged) ++local.untagged;
    local.pos_rejected += results[j].rejected;
    for (const auto& [token, score] : results[j].kept) pooled[jobs[j].position][token] += score;
  }
  if (stats) *stats = local;

  const std::string self_form = canonical(t);
  std::set<std::string> seen{self_form};
  std::vector<Paraphrase> out;
  for (const auto& [pos, by_token] : pooled) {
    std::vector<std::pair<std::string, double>> ordered(by_token.begin(), by_token.end());
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (const auto& [token, score] : ordered) {
      auto swapped = t.with_word(pos, token);
      if (!seen.insert(canonical(swapped)).second) continue;
      out.push_back({std::move(swapped), TokenSwap{pos, t.segments()[pos].word, token, score}});
    }
  }
  return out;
}

inline std::vector<PromptTemplate> paraphrase(const PromptTemplate& t, const Corpus& corpus, Backend& backend,
                                              const LabelMapping& mapping, const RunConfig& config,
                                              unsigned workers = 1) {
  std::vector<PromptTemplate> out;
  for (auto& p : paraphrase_candidates(t, corpus, backend, mapping, config, workers))
    out.push_back(std::move(p.prompt));
  return out;
}

// Base prompt and its paraphrases, each in all four layouts, deduplicated
// by canonical form. Order: origin, swapped word position, paraphrase
// score (descending), layout.
inline CandidateSet generate(const PromptTemplate& base, const Corpus& corpus, Backend& backend,
                             const LabelMapping& mapping, const RunConfig& config, unsigned workers = 1,
                             ParaphraseStats* stats = nullptr) {
  struct Entry {
    Candidate candidate;
    std::size_t layout;
    std::string form;
  };
  std::vector<Entry> entries;
  for (std::size_t li = 0; li < kLayouts.size(); ++li) {
    auto variant = base.with_layout(kLayouts[li].position, kLayouts[li].conjunction);
    Origin origin = Origin::kBase;
    if (!(variant == base))
      origin = kLayouts[li].conjunction == Conjunction::kNone ? Origin::kPositioned : Origin::kSubordinated;
    auto form = canonical(variant);
    entries.push_back({{std::move(variant), {origin, std::nullopt}}, li, std::move(form)});
  }
  for (auto& p : paraphrase_candidates(base, corpus, backend, mapping, config, workers, stats)) {
    for (std::size_t li = 0; li < kLayouts.size(); ++li) {
      auto variant = p.prompt.with_layout(kLayouts[li].position, kLayouts[li].conjunction);
      auto form = canonical(variant);
      entries.push_back({{std::move(variant), {Origin::kParaphrased, p.swap}}, li, std::move(form)});
    }
  }

  auto key = [](const Entry& e) {
    const auto& swap = e.candidate.provenance.replaced_token;
    return std::make_tuple(static_cast<int>(e.candidate.provenance.origin), swap ? swap->index : 0,
                           swap ? -swap->score : 0.0, swap ? swap->new_word : std::string{}, e.layout);
  };
  std::stable_sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    const auto ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    return a.form < b.form;
  });

  CandidateSet set;
  std::set<std::string> seen;
  for (auto& e : entries)
    if (seen.insert(e.form).second) set.candidates.push_back(std::move(e.candidate));
  return set;
}

}  // namespace promptforge

#endif  // PROMPTFORGE_AUGMENTATION_HPP_
