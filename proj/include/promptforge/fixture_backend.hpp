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

#ifndef PROMPTFORGE_FIXTURE_BACKEND_HPP_
#define PROMPTFORGE_FIXTURE_BACKEND_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "promptforge/backend.hpp"
#include "promptforge/error.hpp"

namespace promptforge {

// Table-driven backend. Answers only from its tables; text it has never
// seen gets an empty candidate list or all-zero logits, and bumps
// fallback_count().
//
// Document layout:
//   {"info": {"mask_marker": "[MASK]", "cased": false, "model_name": "..."},
//    "vocab": ["great", ...],                      (optional)
//    "fill_mask": {text: [[token, score, pos], ...]},
//    "mask_logits": {text: {token: logit}}}
class FixtureBackend final : public Backend {
 public:
  static constexpr std::string_view kDefaultModelName = "fixture-v1";

  explicit FixtureBackend(const nlohmann::json& doc) {
    try {
      if (!doc.is_object()) throw Error(ErrorCode::kFixtureParseError, "fixture must be a JSON object");
      info_.mask_marker = "[MASK]";
      info_.cased = false;
      info_.model_name = std::string(kDefaultModelName);
      if (doc.contains("info")) {
        const auto& i = doc.at("info");
        info_.mask_marker = i.value("mask_marker", info_.mask_marker);
        info_.cased = i.value("cased", info_.cased);
        info_.model_name = i.value("model_name", info_.model_name);
        if (info_.mask_marker.empty()) throw Error(ErrorCode::kFixtureParseError, "empty mask_marker");
      }
      if (doc.contains("vocab")) {
        vocab_.emplace();
        for (const auto& w : doc.at("vocab")) vocab_->insert(w.get<std::string>());
      }
      if (doc.contains("fill_mask")) {
        for (const auto& [text, rows] : doc.at("fill_mask").items()) {
          MaskPrediction p;
          for (const auto& row : rows) {
            if (!row.is_array() || row.size() < 2 || row.size() > 3)
              throw Error(ErrorCode::kFixtureParseError, "fill_mask rows are [token, score, pos]");
            MaskCandidate c{row.at(0).get<std::string>(), row.at(1).get<double>(),
                            row.size() == 3 ? row.at(2).get<std::string>() : std::string{}};
            if (!std::isfinite(c.score))
              throw Error(ErrorCode::kFixtureParseError, "non-finite score for '" + c.token + "'");
            p.candidates.push_back(std::move(c));
          }
          std::stable_sort(p.candidates.begin(), p.candidates.end(),
                           [](const auto& a, const auto& b) { return a.score > b.score; });
          fill_mask_.emplace(text, std::move(p));
        }
      }
      if (doc.contains("mask_logits")) {
        for (const auto& [text, obj] : doc.at("mask_logits").items()) {
          if (!obj.is_object()) throw Error(ErrorCode::kFixtureParseError, "mask_logits entries are objects");
          MaskLogits l;
          for (const auto& [tok, v] : obj.items()) {
            const double x = v.get<double>();
            if (!std::isfinite(x)) throw Error(ErrorCode::kFixtureParseError, "non-finite logit");
            l.per_token.emplace(tok, x);
          }
          mask_logits_.emplace(text, std::move(l));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFixtureParseError, e.what());
    }
  }

  BackendInfo handshake() override { return info_; }

  MaskPrediction fill_mask(std::string_view text, std::size_t top_k) override {
    require_single_mask(text, info_.mask_marker);
    if (top_k == 0) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");
    lookups_.fetch_add(1, std::memory_order_relaxed);
    auto it = fill_mask_.find(text);
    if (it == fill_mask_.end()) {
      fallbacks_.fetch_add(1, std::memory_order_relaxed);
      return {};
    }
    MaskPrediction p = it->second;
    if (p.candidates.size() > top_k) p.candidates.resize(top_k);
    return p;
  }

  MaskLogits mask_logits(std::string_view text, std::span<const std::string> tokens) override {
    require_single_mask(text, info_.mask_marker);
    for (const auto& t : tokens)
      if (!in_vocab(t)) throw Error(ErrorCode::kTokenNotInVocab, "'" + t + "'");
    lookups_.fetch_add(1, std::memory_order_relaxed);
    auto it = mask_logits_.find(text);
    const MaskLogits* entry = it == mask_logits_.end() ? nullptr : &it->second;
    bool fell_back = entry == nullptr;
    MaskLogits out;
    for (const auto& t : tokens) {
      double v = 0.0;
      if (entry) {
        auto jt = entry->per_token.find(t);
        if (jt != entry->per_token.end())
          v = jt->second;
        else
          fell_back = true;
      }
      out.per_token[t] = v;
    }
    if (fell_back) fallbacks_.fetch_add(1, std::memory_order_relaxed);
    return out;
  }

  // Single-token check: explicit vocabulary when the fixture lists one,
  // otherwise a word is one token iff it survives basic punctuation
  // splitting (letters and digits only).
  bool in_vocab(std::string_view token) const {
    if (vocab_) return vocab_->count(std::string(token)) > 0;
    if (token.empty()) return false;
    for (char c : token) {
      const auto u = static_cast<unsigned char>(c);
      const bool alnum = (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || (u >= '0' && u <= '9');
      if (!alnum && u < 0x80) return false;
    }
    return true;
  }

  std::size_t lookup_count() const { return lookups_.load(); }
  std::size_t fallback_count() const { return fallbacks_.load(); }

 private:
  BackendInfo info_;
  std::optional<std::set<std::string>> vocab_;
  std::map<std::string, MaskPrediction, std::less<>> fill_mask_;
  std::map<std::string, MaskLogits, std::less<>> mask_logits_;
  std::atomic<std::size_t> lookups_{0};
  std::atomic<std::size_t> fallbacks_{0};
};

inline std::unique_ptr<FixtureBackend> fixture_from_json(const nlohmann::json& doc) {
  return std::make_unique<FixtureBackend>(doc);
}

// An empty file is a valid fixture with no entries.
inline std::unique_ptr<FixtureBackend> fixture_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kFixtureParseError, "cannot open fixture '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string body = buf.str();
  if (text::trim(body).empty()) return fixture_from_json(nlohmann::json::object());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kFixtureParseError, path + ": " + e.what());
  }
  return fixture_from_json(doc);
}

}  // namespace promptforge

#endif  // PROMPTFORGE_FIXTURE_BACKEND_HPP_
