// Copyright 2026 The QUDeval Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "qudeval/llmgate/gateway.h"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "qudeval/common/error.h"
#include "qudeval/common/files.h"
#include "qudeval/common/hash.h"
#include "qudeval/common/url.h"

namespace qudeval::llmgate {

namespace {

using Clock = std::chrono::steady_clock;

LlmResponse ParseCompletionBody(const std::string& body) {
  try {
    auto j = nlohmann::json::parse(body);
    LlmResponse r;
    const auto& content = j.at("choices").at(0).at("message").at("content");
    r.text = content.is_null() ? "" : content.get<std::string>();
    if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
      r.prompt_tokens = usage->value("prompt_tokens", 0);
      r.completion_tokens = usage->value("completion_tokens", 0);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kProviderError, std::string("malformed completion response: ") + e.what());
  }
}

bool Retryable(int status) { return status == 0 || status == 429 || status >= 500; }

}  // namespace

nlohmann::json LlmRequest::Canonical() const {
  return {{"model", model},
          {"prompt", prompt},
          {"temperature", kTemperature},
          {"max_tokens", max_tokens}};
}

std::string LlmRequest::CacheKey() const { return Sha256Hex(Canonical().dump()); }

HttpTransport::HttpTransport(std::string base_url, std::string api_key, int timeout_s)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_s_(timeout_s) {}

TransportResult HttpTransport::Send(const LlmRequest& request) {
  BaseUrl url = ParseBaseUrl(base_url_);
  httplib::Client client(url.origin);
  client.set_connection_timeout(timeout_s_);
  client.set_read_timeout(timeout_s_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  nlohmann::json body = {
      {"model", request.model},
      {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
      {"temperature", LlmRequest::kTemperature},
      {"max_tokens", request.max_tokens},
  };
  auto res = client.Post(url.prefix + "/chat/completions", headers, body.dump(),
                         "application/json");
  if (!res) return {0, "", httplib::to_string(res.error())};
  return {res->status, res->body, ""};
}

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kLive: return "live";
    case Mode::kReplay: return "replay";
    case Mode::kRecord: return "record";
  }
  return "";
}

std::optional<Mode> ParseMode(std::string_view text) {
  for (Mode m : {Mode::kLive, Mode::kReplay, Mode::kRecord}) {
    if (ModeName(m) == text) return m;
  }
  return std::nullopt;
}

GatewayConfig LoadGatewayConfig(const std::filesystem::path& path) {
  GatewayConfig c;
  try {
    auto j = nlohmann::json::parse(ReadFile(path));
    c.base_url = j.value("base_url", c.base_url);
    c.model = j.value("model", c.model);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    if (j.contains("mode")) {
      auto mode = ParseMode(j.at("mode").get<std::string>());
      if (!mode) throw Error(ErrorCode::kSchemaViolation, path.string() + ": unknown mode");
      c.mode = *mode;
    }
    if (j.contains("fixture_dir")) {
      std::filesystem::path dir = j.at("fixture_dir").get<std::string>();
      c.fixture_dir = dir.is_absolute() ? dir : path.parent_path() / dir;
    }
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.max_attempts = j.value("max_attempts", c.max_attempts);
    c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, path.string() + ": " + e.what());
  }
  if (c.max_in_flight < 1 || c.max_attempts < 1) {
    throw Error(ErrorCode::kSchemaViolation,
                path.string() + ": max_in_flight and max_attempts must be positive");
  }
  return c;
}

std::filesystem::path FixturePath(const std::filesystem::path& fixture_dir,
                                  std::string_view key) {
  return fixture_dir / std::string(key.substr(0, 2)) / (std::string(key) + ".json");
}

Gateway::Gateway(GatewayConfig config, std::unique_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
  if (config_.max_in_flight < 1) config_.max_in_flight = 1;
  if (config_.mode == Mode::kReplay || transport_) return;
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::kProviderUnavailable,
                std::string(ModeName(config_.mode)) + " mode needs the API key in $" +
                    config_.api_key_env);
  }
  transport_ = std::make_unique<HttpTransport>(config_.base_url, key, config_.timeout_s);
}

Gateway::~Gateway() = default;

LlmResponse Gateway::Complete(std::string prompt) {
  LlmRequest request;
  request.model = config_.model;
  request.prompt = std::move(prompt);
  request.max_tokens = config_.max_tokens;
  return Complete(request);
}

LlmResponse Gateway::Complete(const LlmRequest& request) {
  const std::string key = request.CacheKey();
  std::promise<LlmResponse> promise;
  std::shared_future<LlmResponse> future;
  bool owner = false;
  {
    std::lock_guard lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      future = it->second;
    } else {
      future = promise.get_future().share();
      cache_.emplace(key, future);
      owner = true;
    }
  }
  if (!owner) {
    LlmResponse r = future.get();  // rethrows the owner's error
    r.cached = true;
    return r;
  }
  try {
    LlmResponse r = Fetch(request, key);
    promise.set_value(r);
    return r;
  } catch (...) {
    promise.set_exception(std::current_exception());
    // Failures are not cached; a later call tries again.
    std::lock_guard lock(mu_);
    cache_.erase(key);
    throw;
  }
}

LlmResponse Gateway::Fetch(const LlmRequest& request, const std::string& key) {
  if (config_.mode != Mode::kLive) {
    if (auto fixture = LoadFixture(key)) return *fixture;
    if (config_.mode == Mode::kReplay) {
      throw Error(ErrorCode::kFixtureMiss,
                  "no fixture for cache key " + key + " under " + config_.fixture_dir.string());
    }
  }
  LlmResponse r = SendWithRetries(request);
  r.cache_key = key;
  if (config_.mode == Mode::kRecord) StoreFixture(request, r);
  return r;
}

LlmResponse Gateway::SendWithRetries(const LlmRequest& request) {
  {
    std::unique_lock lock(slots_mu_);
    slots_cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
    ++in_flight_;
  }
  struct Release {
    Gateway* g;
    ~Release() {
      {
        std::lock_guard lock(g->slots_mu_);
        --g->in_flight_;
      }
      g->slots_cv_.notify_one();
    }
  } release{this};

  TransportResult last;
  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0) {
      int delay = config_.backoff_ms << (attempt - 1);
      spdlog::warn("llm request failed ({}), retrying in {} ms",
                   last.status == 0 ? last.error : "HTTP " + std::to_string(last.status), delay);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    ++network_calls_;
    auto start = Clock::now();
    last = transport_->Send(request);
    if (last.status == 200) {
      LlmResponse r = ParseCompletionBody(last.body);
      r.latency_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      return r;
    }
    if (!Retryable(last.status)) break;
  }
  if (last.status == 429) {
    throw Error(ErrorCode::kRateLimited,
                "rate limited after " + std::to_string(config_.max_attempts) + " attempts");
  }
  throw Error(ErrorCode::kProviderError,
              last.status == 0 ? "provider unreachable: " + last.error
                               : "provider returned HTTP " + std::to_string(last.status) + ": " +
                                     last.body.substr(0, 200));
}

std::optional<LlmResponse> Gateway::LoadFixture(const std::string& key) const {
  auto path = FixturePath(config_.fixture_dir, key);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    auto j = nlohmann::json::parse(ReadFile(path));
    if (j.at("key").get<std::string>() != key) {
      throw Error(ErrorCode::kSchemaViolation, path.string() + ": key does not match file name");
    }
    const auto& resp = j.at("response");
    LlmResponse r;
    r.text = resp.at("text").get<std::string>();
    r.prompt_tokens = resp.value("prompt_tokens", 0);
    r.completion_tokens = resp.value("completion_tokens", 0);
    r.cached = true;
    r.cache_key = key;
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, path.string() + ": " + e.what());
  }
}

void Gateway::StoreFixture(const LlmRequest& request, const LlmResponse& response) const {
  std::string key = request.CacheKey();
  nlohmann::ordered_json j;
  j["key"] = key;
  j["request"] = request.Canonical();
  j["response"] = {{"text", response.text},
                   {"prompt_tokens", response.prompt_tokens},
                   {"completion_tokens", response.completion_tokens}};
  auto path = FixturePath(config_.fixture_dir, key);
  std::filesystem::create_directories(path.parent_path());
  WriteFileAtomic(path, j.dump(2) + "\n");
}

}  // namespace qudeval::llmgate
