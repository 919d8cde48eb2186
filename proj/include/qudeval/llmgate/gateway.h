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


// Chat-completion gateway: canonical request keys, an in-memory cache with
// in-flight deduplication, content-addressed replay fixtures, bounded
// concurrency and retries.

#ifndef QUDEVAL_LLMGATE_GATEWAY_H_
#define QUDEVAL_LLMGATE_GATEWAY_H_

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace qudeval::llmgate {

inline constexpr char kApiKeyEnv[] = "QUDEVAL_LLM_API_KEY";

struct LlmRequest {
  std::string model;
  std::string prompt;
  int max_tokens = 256;
  // Always 0; part of the key so a future change invalidates fixtures.
  static constexpr double kTemperature = 0.0;

  // {"max_tokens","model","prompt","temperature"} with sorted keys.
  nlohmann::json Canonical() const;
  // SHA-256 hex of the canonical serialization.
  std::string CacheKey() const;
};

struct LlmResponse {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  double latency_ms = 0.0;
  bool cached = false;
  std::string cache_key;
};

// What a transport returns for one HTTP exchange.
struct TransportResult {
  int status = 0;  // 0 when the connection failed
  std::string body;
  std::string error;
};

// One attempt at a completion. Implementations must be thread-safe.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportResult Send(const LlmRequest& request) = 0;
};

// POST <base>/chat/completions in the OpenAI wire format.
class HttpTransport : public Transport {
 public:
  HttpTransport(std::string base_url, std::string api_key, int timeout_s = 60);
  TransportResult Send(const LlmRequest& request) override;

 private:
  std::string base_url_;
  std::string api_key_;
  int timeout_s_;
};

enum class Mode { kLive, kReplay, kRecord };

std::string_view ModeName(Mode mode);
std::optional<Mode> ParseMode(std::string_view text);

struct GatewayConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4";
  int max_in_flight = 4;
  Mode mode = Mode::kReplay;
  std::filesystem::path fixture_dir = "fixtures";
  std::string api_key_env = kApiKeyEnv;
  int max_tokens = 256;
  int max_attempts = 3;
  int backoff_ms = 500;  // doubled after each failed attempt
  int timeout_s = 60;
};

// Reads {"base_url","model","max_in_flight","mode","fixture_dir",
// "api_key_env","max_tokens","max_attempts","backoff_ms","timeout_s"}; absent
// keys keep their defaults and a relative fixture_dir resolves against the
// file's directory.
GatewayConfig LoadGatewayConfig(const std::filesystem::path& path);

// fixtures/<first two hex digits>/<key>.json
std::filesystem::path FixturePath(const std::filesystem::path& fixture_dir,
                                  std::string_view key);

// Shareable across threads.
class Gateway {
 public:
  // Live and record modes need the API key variable to be set unless a
  // transport is injected. Replay never constructs a transport.
  explicit Gateway(GatewayConfig config, std::unique_ptr<Transport> transport = nullptr);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  const GatewayConfig& config() const { return config_; }

  // Errors: FixtureMiss (replay), ProviderError, RateLimited.
  LlmResponse Complete(const LlmRequest& request);
  // Request for the configured model and token limit.
  LlmResponse Complete(std::string prompt);

  // Writes a fixture for `request` as record mode would.
  void StoreFixture(const LlmRequest& request, const LlmResponse& response) const;

  // Number of transport attempts made so far.
  int network_calls() const { return network_calls_.load(); }

 private:
  LlmResponse Fetch(const LlmRequest& request, const std::string& key);
  LlmResponse SendWithRetries(const LlmRequest& request);
  std::optional<LlmResponse> LoadFixture(const std::string& key) const;

  GatewayConfig config_;
  std::unique_ptr<Transport> transport_;
  std::atomic<int> network_calls_{0};

  std::mutex mu_;
  std::map<std::string, std::shared_future<LlmResponse>> cache_;

  std::mutex slots_mu_;
  std::condition_variable slots_cv_;
  int in_flight_ = 0;
};

}  // namespace qudeval::llmgate

#endif  // QUDEVAL_LLMGATE_GATEWAY_H_
