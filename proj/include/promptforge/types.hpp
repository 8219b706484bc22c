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

#ifndef PROMPTFORGE_TYPES_HPP_
#define PROMPTFORGE_TYPES_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "promptforge/error.hpp"
#include "promptforge/text.hpp"

namespace promptforge {

enum class Label { kNegative = 0, kPositive = 1 };

inline constexpr std::array<Label, 2> kLabels = {Label::kPositive, Label::kNegative};

constexpr Label opposite(Label l) {
  return l == Label::kPositive ? Label::kNegative : Label::kPositive;
}

inline std::string_view label_name(Label l) {
  return l == Label::kPositive ? "positive" : "negative";
}

inline Label parse_label_name(std::string_view s) {
  if (text::iequals(s, "positive") || text::iequals(s, "pos")) return Label::kPositive;
  if (text::iequals(s, "negative") || text::iequals(s, "neg")) return Label::kNegative;
  throw Error(ErrorCode::kUnknownLabel, "unknown label '" + std::string(s) + "'");
}

// Bijection from the two labels to single lowercase words.
class LabelMapping {
 public:
  LabelMapping(std::string positive_word, std::string negative_word)
      : positive_(text::to_lower(text::trim(positive_word))),
        negative_(text::to_lower(text::trim(negative_word))) {
    for (const auto* w : {&positive_, &negative_}) {
      if (w->empty()) throw Error(ErrorCode::kInvalidMapping, "empty mapping word");
      if (text::has_space(*w))
        throw Error(ErrorCode::kInvalidMapping, "mapping word '" + *w + "' contains whitespace");
    }
    if (positive_ == negative_)
      throw Error(ErrorCode::kInvalidMapping, "mapping words must differ, both are '" + positive_ + "'");
  }

  const std::string& word(Label l) const { return l == Label::kPositive ? positive_ : negative_; }
  const std::string& positive() const { return positive_; }
  const std::string& negative() const { return negative_; }

  std::optional<Label> label_of(std::string_view w) const {
    if (text::iequals(w, positive_)) return Label::kPositive;
    if (text::iequals(w, negative_)) return Label::kNegative;
    return std::nullopt;
  }

  friend bool operator==(const LabelMapping&, const LabelMapping&) = default;

 private:
  std::string positive_;
  std::string negative_;
};

// Accepts "pos=great,neg=terrible" (also positive=/negative=, either order).
inline LabelMapping parse_mapping(std::string_view spec) {
  std::optional<std::string> pos, neg;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t comma = spec.find(',', start);
    if (comma == std::string_view::npos) comma = spec.size();
    std::string_view item = text::trim(spec.substr(start, comma - start));
    start = comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::kInvalidMapping, "expected label=word, got '" + std::string(item) + "'");
    Label l = Label::kPositive;
    try {
      l = parse_label_name(text::trim(item.substr(0, eq)));
    } catch (const Error&) {
      throw Error(ErrorCode::kInvalidMapping, "unknown label in '" + std::string(item) + "'");
    }
    auto& slot = l == Label::kPositive ? pos : neg;
    if (slot) throw Error(ErrorCode::kInvalidMapping, "label given twice in '" + std::string(spec) + "'");
    slot = std::string(text::trim(item.substr(eq + 1)));
  }
  if (!pos || !neg) throw Error(ErrorCode::kInvalidMapping, "mapping needs both pos= and neg=");
  return LabelMapping(*pos, *neg);
}

struct Sentence {
  std::size_t id = 0;
  std::string text;
};

struct Corpus {
  std::vector<Sentence> sentences;
  std::string source;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }

  // Builds a corpus with dense ids; blank lines are dropped.
  static Corpus from_texts(const std::vector<std::string>& texts, std::string source = {}) {
    Corpus c;
    c.source = std::move(source);
    for (const auto& t : texts) {
      auto trimmed = text::trim(t);
      if (trimmed.empty()) continue;
      c.sentences.push_back({c.sentences.size(), std::string(trimmed)});
    }
    return c;
  }
};

// One sentence per line, UTF-8.
inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open corpus '" + path + "'");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
  return Corpus::from_texts(lines, path);
}

enum class Position { kAfterSentence, kBeforeSentence };
enum class Conjunction { kNone, kBecause, kSo };

inline std::string_view position_name(Position p) {
  return p == Position::kAfterSentence ? "after" : "before";
}

inline std::string_view conjunction_name(Conjunction c) {
  switch (c) {
    case Conjunction::kBecause: return "because";
    case Conjunction::kSo: return "so";
    default: return "none";
  }
}

inline bool pairing_allowed(Position p, Conjunction c) {
  if (c == Conjunction::kBecause) return p == Position::kBeforeSentence;
  if (c == Conjunction::kSo) return p == Position::kAfterSentence;
  return true;
}

struct Segment {
  enum class Kind { kWord, kMask };
  Kind kind = Kind::kWord;
  std::string word;  // empty for kMask

  static Segment mask() { return {Kind::kMask, {}}; }
  static Segment of(std::string w) { return {Kind::kWord, std::move(w)}; }
  bool is_mask() const { return kind == Kind::kMask; }

  friend bool operator==(const Segment&, const Segment&) = default;
};

// Cloze prompt: a sequence of lowercase words with exactly one mask slot.
// The sentence slot is implicit; position and conjunction decide where the
// sentence goes when rendering.
class PromptTemplate {
 public:
  PromptTemplate(std::vector<Segment> segments, Position position,
                 Conjunction conjunction = Conjunction::kNone)
      : segments_(std::move(segments)), position_(position), conjunction_(conjunction) {
    std::size_t masks = 0;
    for (auto& s : segments_) {
      if (s.is_mask()) {
        ++masks;
        continue;
      }
      s.word = text::to_lower(s.word);
      if (s.word.empty() || text::has_space(s.word))
        throw Error(ErrorCode::kInvalidTemplate, "template words must be non-empty single tokens");
    }
    if (masks != 1)
      throw Error(ErrorCode::kInvalidTemplate,
                  "template needs exactly one mask slot, found " + std::to_string(masks));
    if (!pairing_allowed(position_, conjunction_))
      throw Error(ErrorCode::kInvalidTemplate,
                  std::string("conjunction '") + std::string(conjunction_name(conjunction_)) +
                      "' cannot be used with the prompt " + std::string(position_name(position_)) +
                      " the sentence");
  }

  const std::vector<Segment>& segments() const { return segments_; }
  Position position() const { return position_; }
  Conjunction conjunction() const { return conjunction_; }

  std::size_t mask_index() const {
    for (std::size_t i = 0; i < segments_.size(); ++i)
      if (segments_[i].is_mask()) return i;
    return segments_.size();  // unreachable for a constructed template
  }

  PromptTemplate with_layout(Position p, Conjunction c) const { return {segments_, p, c}; }

  PromptTemplate with_word(std::size_t index, std::string word) const {
    if (index >= segments_.size() || segments_[index].is_mask())
      throw Error(ErrorCode::kInvalidArgument, "segment " + std::to_string(index) + " is not a word");
    auto segs = segments_;
    segs[index].word = std::move(word);
    return {std::move(segs), position_, conjunction_};
  }

  friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;

 private:
  std::vector<Segment> segments_;
  Position position_;
  Conjunction conjunction_;
};

struct RenderStyle {
  std::string mask_marker = "[MASK]";
  bool lowercase_sentence = false;
};

namespace detail {

inline std::string join_prompt(const PromptTemplate& t, std::string_view mask_fill,
                               std::optional<std::size_t> masked_word,
                               std::string_view mask_marker) {
  std::string out;
  const auto& segs = t.segments();
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (i) out += ' ';
    if (segs[i].is_mask())
      out += mask_fill;
    else if (masked_word && *masked_word == i)
      out += mask_marker;
    else
      out += segs[i].word;
  }
  return out;
}

inline std::string assemble(Position p, Conjunction c, std::string_view prompt,
                            std::string_view sentence) {
  std::string out;
  if (p == Position::kAfterSentence) {
    out.append(sentence);
    out += c == Conjunction::kSo ? " so " : " . ";
    out.append(prompt);
  } else {
    out.append(prompt);
    out += c == Conjunction::kBecause ? " because " : " . ";
    out.append(sentence);
  }
  out += " .";
  return out;
}

}  // namespace detail

// Joins the sentence and the prompt:
//   after/none   "<sentence> . <prompt> ."
//   before/none  "<prompt> . <sentence> ."
//   after/so     "<sentence> so <prompt> ."
//   before/because "<prompt> because <sentence> ."
inline std::string render(const PromptTemplate& t, std::string_view sentence,
                          std::string_view mask_marker) {
  return detail::assemble(t.position(), t.conjunction(),
                          detail::join_prompt(t, mask_marker, std::nullopt, mask_marker), sentence);
}

inline std::string render(const PromptTemplate& t, std::string_view sentence,
                          const RenderStyle& style) {
  if (style.lowercase_sentence) return render(t, text::to_lower(sentence), style.mask_marker);
  return render(t, sentence, style.mask_marker);
}

// Renders with the mask slot filled by `placeholder` and word `masked_word`
// replaced by the mask marker (paraphrase context).
inline std::string render_masked_word(const PromptTemplate& t, std::string_view sentence,
                                      std::string_view placeholder, std::size_t masked_word,
                                      const RenderStyle& style) {
  const std::string s = style.lowercase_sentence ? text::to_lower(sentence) : std::string(sentence);
  return detail::assemble(t.position(), t.conjunction(),
                          detail::join_prompt(t, placeholder, masked_word, style.mask_marker), s);
}

inline constexpr std::string_view kCanonicalSentence = "<sentence>";

// Backend-independent display and identity form.
inline std::string canonical(const PromptTemplate& t) {
  return render(t, kCanonicalSentence, "[MASK]");
}

// Parses a user prompt such as "The sentence was [MASK]",
// "<sentence>. It was [MASK]." or "[MASK] because <sentence>".
// Without a "<sentence>" marker the prompt goes after the sentence.
inline PromptTemplate parse_prompt(std::string_view spec) {
  std::vector<std::string> raw;
  for (auto& tok : text::split_whitespace(spec)) {
    // Detach periods so "<sentence>." and "[MASK]." split cleanly.
    std::string cur;
    for (char c : tok) {
      if (c == '.') {
        if (!cur.empty()) raw.push_back(std::move(cur));
        cur.clear();
        raw.emplace_back(".");
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) raw.push_back(std::move(cur));
  }

  std::optional<std::size_t> sentence_at;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (text::iequals(raw[i], "<sentence>")) {
      if (sentence_at) throw Error(ErrorCode::kInvalidTemplate, "more than one <sentence> slot");
      sentence_at = i;
    }
  }

  Position position = Position::kAfterSentence;
  Conjunction conjunction = Conjunction::kNone;
  std::vector<std::string> words;
  if (!sentence_at) {
    words = raw;
  } else {
    std::vector<std::string> before(raw.begin(), raw.begin() + *sentence_at);
    std::vector<std::string> after(raw.begin() + *sentence_at + 1, raw.end());
    auto strip_dots = [](std::vector<std::string>& v) {
      while (!v.empty() && v.front() == ".") v.erase(v.begin());
      while (!v.empty() && v.back() == ".") v.pop_back();
    };
    strip_dots(before);
    strip_dots(after);
    if (!before.empty() && !after.empty())
      throw Error(ErrorCode::kInvalidTemplate, "prompt text on both sides of <sentence>");
    if (before.empty()) {
      position = Position::kAfterSentence;
      if (!after.empty() && text::iequals(after.front(), "so")) {
        conjunction = Conjunction::kSo;
        after.erase(after.begin());
      }
      words = std::move(after);
    } else {
      position = Position::kBeforeSentence;
      if (text::iequals(before.back(), "because")) {
        conjunction = Conjunction::kBecause;
        before.pop_back();
      }
      words = std::move(before);
    }
  }

  std::vector<Segment> segments;
  for (auto& w : words) {
    if (w == ".") continue;
    if (text::iequals(w, "[mask]") || text::iequals(w, "<mask>"))
      segments.push_back(Segment::mask());
    else
      segments.push_back(Segment::of(w));
  }
  return PromptTemplate(std::move(segments), position, conjunction);
}

inline nlohmann::json to_json(const PromptTemplate& t) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : t.segments()) segs.push_back(s.is_mask() ? nlohmann::json(nullptr) : nlohmann::json(s.word));
  return {{"segments", segs},
          {"position", position_name(t.position())},
          {"conjunction", conjunction_name(t.conjunction())}};
}

inline PromptTemplate template_from_json(const nlohmann::json& j) {
  try {
    std::vector<Segment> segs;
    for (const auto& s : j.at("segments"))
      segs.push_back(s.is_null() ? Segment::mask() : Segment::of(s.get<std::string>()));
    const auto pos = j.at("position").get<std::string>();
    const auto conj = j.at("conjunction").get<std::string>();
    Position p = Position::kAfterSentence;
    if (pos == "before") p = Position::kBeforeSentence;
    else if (pos != "after") throw Error(ErrorCode::kInvalidTemplate, "bad position '" + pos + "'");
    Conjunction c = Conjunction::kNone;
    if (conj == "because") c = Conjunction::kBecause;
    else if (conj == "so") c = Conjunction::kSo;
    else if (conj != "none") throw Error(ErrorCode::kInvalidTemplate, "bad conjunction '" + conj + "'");
    return PromptTemplate(std::move(segs), p, c);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("template: ") + e.what());
  }
}

struct RunConfig {
  std::size_t paraphrase_top_k = 30;
  std::size_t synonyms_per_word = 6;
  std::size_t probe_limit = 100;
  std::size_t sample_instances = 8;
  std::uint64_t random_seed = 0;
  std::size_t aggregation_k = 1;
  bool lexicon_enabled = true;

  void validate() const {
    auto positive = [](std::size_t v, const char* name) {
      if (v < 1) throw Error(ErrorCode::kConfigError, std::string(name) + " must be >= 1");
    };
    positive(paraphrase_top_k, "paraphrase_top_k");
    positive(synonyms_per_word, "synonyms_per_word");
    positive(probe_limit, "probe_limit");
    positive(sample_instances, "sample_instances");
    positive(aggregation_k, "aggregation_k");
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  return {{"paraphrase_top_k", c.paraphrase_top_k}, {"synonyms_per_word", c.synonyms_per_word},
          {"probe_limit", c.probe_limit},           {"sample_instances", c.sample_instances},
          {"random_seed", c.random_seed},           {"aggregation_k", c.aggregation_k},
          {"lexicon_enabled", c.lexicon_enabled}};
}

}  // namespace promptforge

#endif  // PROMPTFORGE_TYPES_HPP_
