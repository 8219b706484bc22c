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

#ifndef PROMPTFORGE_HTTP_BACKEND_HPP_
#define PROMPTFORGE_HTTP_BACKEND_HPP_

#include <atomic>
#include <chrono>
#include <cstddef>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "promptforge/backend.hpp"
#include "promptforge/error.hpp"

namespace promptforge {

struct HttpBackendOptions {
  std::string base_url;  // e.g. "http://127.0.0.1:8765"
  std::size_t max_in_flight = 8;
  std::chrono::seconds connect_timeout{5};
  std::chrono::seconds read_timeout{120};
  int loading_retries = 3;  // extra attempts while the server answers 503
  std::chrono::milliseconds retry_delay{500};
};

// Client for the sidecar protocol:
//   POST /v1/info        -> {"mask_marker", "cased", "model_name"}
//   POST /v1/fill-mask   {"text", "top_k"}  -> {"candidates": [{"token","score","pos"}]}
//   POST /v1/mask-logits {"text", "tokens"} -> {"logits": {token: float}}
// 400 bodies carry {"error": code}; 503 means the model is still loading.
class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendOptions options)
      : options_(std::move(options)),
        slots_(static_cast<std::ptrdiff_t>(options_.max_in_flight ? options_.max_in_flight : 1)) {
    if (options_.base_url.empty()) throw Error(ErrorCode::kConfigError, "empty backend URL");
    while (!options_.base_url.empty() && options_.base_url.back() == '/') options_.base_url.pop_back();
  }

  BackendInfo handshake() override {
    std::lock_guard lock(info_mu_);
    if (!info_) info_ = backend_info_from_json(post("/v1/info", nlohmann::json::object()));
    return *info_;
  }

  MaskPrediction fill_mask(std::string_view text, std::size_t top_k) override {
    require_single_mask(text, handshake().mask_marker);
    auto p = mask_prediction_from_json(post("/v1/fill-mask", {{"text", text}, {"top_k", top_k}}));
    check_prediction(p, top_k);
    return p;
  }

  MaskLogits mask_logits(std::string_view text, std::span<const std::string> tokens) override {
    require_single_mask(text, handshake().mask_marker);
    nlohmann::json toks = nlohmann::json::array();
    for (const auto& t : tokens) toks.push_back(t);
    auto l = mask_logits_from_json(post("/v1/mask-logits", {{"text", text}, {"tokens", toks}}));
    for (const auto& t : tokens)
      if (!l.per_token.count(t)) throw Error(ErrorCode::kBackendError, "missing logit for '" + t + "'");
    if (l.per_token.size() != tokens.size())
      throw Error(ErrorCode::kBackendError, "backend returned unrequested tokens");
    return l;
  }

  std::size_t requests_sent() const { return requests_.load(); }

 private:
  struct SlotGuard {
    explicit SlotGuard(std::counting_semaphore<>& s) : sem(s) { sem.acquire(); }
    ~SlotGuard() { sem.release(); }
    std::counting_semaphore<>& sem;
  };

  static ErrorCode code_from_wire(std::string_view code) {
    if (code == "NoMaskInInput") return ErrorCode::kNoMaskInInput;
    if (code == "MultipleMasks") return ErrorCode::kMultipleMasks;
    if (code == "TokenNotInVocab") return ErrorCode::kTokenNotInVocab;
    return ErrorCode::kBackendError;
  }

  nlohmann::json post(const std::string& path, const nlohmann::json& body) {
    SlotGuard slot(slots_);
    const std::string payload = body.dump();
    for (int attempt = 0;; ++attempt) {
      httplib::Client client(options_.base_url);
      client.set_connection_timeout(options_.connect_timeout);
      client.set_read_timeout(options_.read_timeout);
      requests_.fetch_add(1, std::memory_order_relaxed);
      auto res = client.Post(path, payload, "application/json");
      if (!res)
        throw Error(ErrorCode::kBackendUnreachable,
                    options_.base_url + path + ": " + httplib::to_string(res.error()));
      if (res->status == 200) {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error& e) {
          throw Error(ErrorCode::kBackendError, path + ": malformed response: " + e.what());
        }
      }
      if (res->status == 503) {
        if (attempt < options_.loading_retries) {
          std::this_thread::sleep_for(options_.retry_delay);
          continue;
        }
        throw Error(ErrorCode::kBackendError, path + ": backend still loading (503)");
      }
      if (res->status == 400) {
        std::string code = "unknown";
        try {
          code = nlohmann::json::parse(res->body).value("error", code);
        } catch (const nlohmann::json::exception&) {
        }
        throw Error(code_from_wire(code), path + ": " + code);
      }
      throw Error(ErrorCode::kBackendError, path + ": HTTP " + std::to_string(res->status));
    }
  }

  HttpBackendOptions options_;
  std::counting_semaphore<> slots_;
  std::mutex info_mu_;
  std::optional<BackendInfo> info_;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace promptforge

#endif  // PROMPTFORGE_HTTP_BACKEND_HPP_
