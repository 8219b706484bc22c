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

#ifndef PROMPTFORGE_LEXICON_HPP_
#define PROMPTFORGE_LEXICON_HPP_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "promptforge/error.hpp"
#include "promptforge/text.hpp"

namespace promptforge {

// Headword -> synonyms, lowercase, deduplicated, never containing the
// headword itself. Read-only once built.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  explicit SynonymLexicon(const std::map<std::string, std::vector<std::string>>& raw) {
    for (const auto& [head, syns] : raw) {
      const std::string key = text::to_lower(head);
      auto& list = entries_[key];
      for (const auto& s : syns) {
        std::string w = text::to_lower(s);
        if (w.empty() || w == key || std::find(list.begin(), list.end(), w) != list.end()) continue;
        list.push_back(std::move(w));
      }
    }
  }

  // First n synonyms in stored order; empty when the word is unknown.
  std::vector<std::string> synonyms(std::string_view word, std::size_t n) const {
    if (n < 1) throw Error(ErrorCode::kInvalidArgument, "synonym count must be >= 1");
    auto it = entries_.find(text::to_lower(word));
    if (it == entries_.end()) return {};
    const auto& all = it->second;
    return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(n, all.size()))};
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return entries_; }

  nlohmann::json to_json() const {
    nlohmann::json e = nlohmann::json::object();
    for (const auto& [k, v] : entries_) e[k] = v;
    return {{"version", 1}, {"entries", e}};
  }

  static SynonymLexicon from_json(const nlohmann::json& doc) {
    try {
      if (doc.at("version").get<int>() != 1)
        throw Error(ErrorCode::kLexiconParseError, "unsupported lexicon version");
      std::map<std::string, std::vector<std::string>> raw;
      for (const auto& [k, v] : doc.at("entries").items()) raw[k] = v.get<std::vector<std::string>>();
      return SynonymLexicon(raw);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kLexiconParseError, e.what());
    }
  }

  static SynonymLexicon load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kLexiconParseError, "cannot open lexicon '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      return from_json(nlohmann::json::parse(buf.str()));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kLexiconParseError, path + ": " + e.what());
    }
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write lexicon '" + path + "'");
    out << to_json().dump() << '\n';
  }

 private:
  std::map<std::string, std::vector<std::string>> entries_;
};

namespace wordnet_detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kWordNetParseError, "cannot open " + p.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

// "great(p)" -> "great"
inline std::string strip_syntactic_marker(std::string lemma) {
  if (!lemma.empty() && lemma.back() == ')') {
    if (auto open = lemma.rfind('('); open != std::string::npos) lemma.erase(open);
  }
  return text::to_lower(lemma);
}

// data.<pos>: offset -> lemmas of the synset, in file order.
inline std::unordered_map<std::string, std::vector<std::string>> parse_data(const std::filesystem::path& p) {
  std::unordered_map<std::string, std::vector<std::string>> synsets;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(p)) {
    ++line_no;
    if (line.empty() || line.front() == ' ') continue;  // license preamble
    std::istringstream fields(line);
    std::string offset, lex_filenum, ss_type, w_cnt_hex;
    if (!(fields >> offset >> lex_filenum >> ss_type >> w_cnt_hex))
      throw Error(ErrorCode::kWordNetParseError, p.string() + ":" + std::to_string(line_no) + ": short record");
    std::size_t w_cnt = 0;
    try {
      w_cnt = std::stoul(w_cnt_hex, nullptr, 16);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kWordNetParseError, p.string() + ":" + std::to_string(line_no) + ": bad w_cnt");
    }
    std::vector<std::string> lemmas;
    for (std::size_t i = 0; i < w_cnt; ++i) {
      std::string word, lex_id;
      if (!(fields >> word >> lex_id))
        throw Error(ErrorCode::kWordNetParseError, p.string() + ":" + std::to_string(line_no) + ": truncated words");
      lemmas.push_back(strip_syntactic_marker(std::move(word)));
    }
    synsets.emplace(std::move(offset), std::move(lemmas));
  }
  return synsets;
}

struct IndexEntry {
  std::string lemma;
  std::vector<std::string> offsets;  // sense order
};

inline std::vector<IndexEntry> parse_index(const std::filesystem::path& p) {
  std::vector<IndexEntry> out;
  std::size_t line_no = 0;
  for (const auto& line : read_lines(p)) {
    ++line_no;
    if (line.empty() || line.front() == ' ') continue;
    const auto f = text::split_whitespace(line);
    auto fail = [&](const char* what) {
      return Error(ErrorCode::kWordNetParseError, p.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    if (f.size() < 6) throw fail("short index record");
    std::size_t synset_cnt = 0, p_cnt = 0;
    try {
      synset_cnt = std::stoul(f[2]);
      p_cnt = std::stoul(f[3]);
    } catch (const std::exception&) {
      throw fail("bad counts");
    }
    const std::size_t first = 4 + p_cnt + 2;
    if (f.size() < first + synset_cnt) throw fail("truncated offsets");
    out.push_back({f[0], {f.begin() + static_cast<std::ptrdiff_t>(first),
                          f.begin() + static_cast<std::ptrdiff_t>(first + synset_cnt)}});
  }
  return out;
}

}  // namespace wordnet_detail

// Builds a lexicon from a WordNet 3.0 database directory (index.* and
// data.* for adj, adv, noun, verb). Parts of speech are pooled in that
// order; within one, synonyms follow sense order and then lemma order.
// Underscored multiword lemmas are dropped.
inline SynonymLexicon import_wordnet(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  static constexpr std::array<std::string_view, 4> kParts = {"adj", "adv", "noun", "verb"};
  for (auto part : kParts) {
    for (auto kind : {"index.", "data."}) {
      const auto p = dir / (std::string(kind) + std::string(part));
      if (!fs::is_regular_file(p)) throw Error(ErrorCode::kWordNetParseError, "missing " + p.string());
    }
  }
  std::map<std::string, std::vector<std::string>> entries;
  std::map<std::string, std::set<std::string>> seen;
  for (auto part : kParts) {
    const auto synsets = wordnet_detail::parse_data(dir / ("data." + std::string(part)));
    for (const auto& idx : wordnet_detail::parse_index(dir / ("index." + std::string(part)))) {
      if (idx.lemma.find('_') != std::string::npos) continue;
      const std::string head = text::to_lower(idx.lemma);
      for (const auto& off : idx.offsets) {
        auto it = synsets.find(off);
        if (it == synsets.end())
          throw Error(ErrorCode::kWordNetParseError,
                      "index." + std::string(part) + " refers to missing synset " + off);
        for (const auto& lemma : it->second) {
          if (lemma == head || lemma.find('_') != std::string::npos) continue;
          if (seen[head].insert(lemma).second) entries[head].push_back(lemma);
        }
      }
    }
  }
  if (entries.empty()) throw Error(ErrorCode::kWordNetParseError, "no synonyms found under " + dir.string());
  return SynonymLexicon(entries);
}

}  // namespace promptforge

#endif  // PROMPTFORGE_LEXICON_HPP_
