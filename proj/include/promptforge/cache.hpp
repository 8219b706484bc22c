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

#ifndef PROMPTFORGE_CACHE_HPP_
#define PROMPTFORGE_CACHE_HPP_

#include <cstddef>
#include <cstdio>
#include <exception>
#include <fstream>
#include <future>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "promptforge/backend.hpp"
#include "promptforge/error.hpp"

namespace promptforge {

// Thread-safe LRU memo table. capacity 0 means unbounded. Concurrent
// misses on the same key run the computation once; the other callers wait
// for its result.
template <typename Value>
class LruCache {
 public:
  explicit LruCache(std::size_t capacity = 0) : capacity_(capacity) {}

  LruCache(const LruCache&) = delete;
  LruCache& operator=(const LruCache&) = delete;

  template <typename Compute>
  Value get_or_compute(const std::string& key, Compute&& compute) {
    std::unique_lock lock(mu_);
    if (auto it = index_.find(key); it != index_.end()) {
      ++hits_;
      order_.splice(order_.begin(), order_, it->second);
      return it->second->second;
    }
    if (auto it = inflight_.find(key); it != inflight_.end()) {
      ++hits_;
      auto pending = it->second;
      lock.unlock();
      return pending.get();
    }
    ++misses_;
    std::promise<Value> promise;
    inflight_.emplace(key, promise.get_future().share());
    lock.unlock();
    try {
      Value v = compute();
      lock.lock();
      insert_locked(key, v);
      inflight_.erase(key);
      promise.set_value(v);
      return v;
    } catch (...) {
      if (!lock.owns_lock()) lock.lock();
      inflight_.erase(key);
      promise.set_exception(std::current_exception());
      throw;
    }
  }

  std::optional<Value> get(const std::string& key) {
    std::lock_guard lock(mu_);
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }

  void put(const std::string& key, Value v) {
    std::lock_guard lock(mu_);
    insert_locked(key, std::move(v));
  }

  // Entries ordered by key.
  std::map<std::string, Value> snapshot() const {
    std::lock_guard lock(mu_);
    std::map<std::string, Value> out;
    for (const auto& [k, v] : order_) out.emplace(k, v);
    return out;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return order_.size();
  }
  std::size_t hits() const {
    std::lock_guard lock(mu_);
    return hits_;
  }
  std::size_t misses() const {
    std::lock_guard lock(mu_);
    return misses_;
  }
  std::size_t evictions() const {
    std::lock_guard lock(mu_);
    return evictions_;
  }
  std::size_t capacity() const { return capacity_; }

 private:
  void insert_locked(const std::string& key, Value v) {
    if (auto it = index_.find(key); it != index_.end()) {
      it->second->second = std::move(v);
      order_.splice(order_.begin(), order_, it->second);
      return;
    }
    order_.emplace_front(key, std::move(v));
    index_.emplace(key, order_.begin());
    if (capacity_ && order_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
      ++evictions_;
    }
  }

  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<std::pair<std::string, Value>> order_;  // most recent first
  std::unordered_map<std::string, typename std::list<std::pair<std::string, Value>>::iterator> index_;
  std::unordered_map<std::string, std::shared_future<Value>> inflight_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
  std::size_t evictions_ = 0;
};

// Memoizes every backend response keyed by the request bytes.
class CachingBackend final : public Backend {
 public:
  explicit CachingBackend(Backend& inner, std::size_t capacity = 0)
      : inner_(inner), cache_(capacity) {}

  BackendInfo handshake() override {
    return backend_info_from_json(cache_.get_or_compute("info", [&] { return to_json(inner_.handshake()); }));
  }

  MaskPrediction fill_mask(std::string_view text, std::size_t top_k) override {
    const std::string key = "fill-mask " + nlohmann::json{{"text", text}, {"top_k", top_k}}.dump();
    return mask_prediction_from_json(
        cache_.get_or_compute(key, [&] { return to_json(inner_.fill_mask(text, top_k)); }));
  }

  MaskLogits mask_logits(std::string_view text, std::span<const std::string> tokens) override {
    nlohmann::json toks = nlohmann::json::array();
    for (const auto& t : tokens) toks.push_back(t);
    const std::string key = "mask-logits " + nlohmann::json{{"text", text}, {"tokens", toks}}.dump();
    return mask_logits_from_json(
        cache_.get_or_compute(key, [&] { return to_json(inner_.mask_logits(text, tokens)); }));
  }

  std::size_t hits() const { return cache_.hits(); }
  std::size_t misses() const { return cache_.misses(); }
  std::size_t size() const { return cache_.size(); }
  std::size_t evictions() const { return cache_.evictions(); }

  void save(const std::string& path) const {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [k, v] : cache_.snapshot()) doc[k] = v;
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorCode::kIoError, "cannot write cache '" + path + "'");
      out << doc.dump() << '\n';
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
      throw Error(ErrorCode::kIoError, "cannot move cache into place at '" + path + "'");
  }

  // Missing file is not an error: the cache starts empty.
  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return;
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      const auto doc = nlohmann::json::parse(buf.str());
      for (const auto& [k, v] : doc.items()) cache_.put(k, v);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kParseError, "cache file '" + path + "': " + e.what());
    }
  }

 private:
  Backend& inner_;
  LruCache<nlohmann::json> cache_;
};

}  // namespace promptforge

#endif  // PROMPTFORGE_CACHE_HPP_
