// Copyright 2026 The MVP Grounding Authors. All Rights Reserved.
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

#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

#include "json.hpp"
#include "mvp/backend/backend.hpp"

namespace mvp {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_delay{200};
  double multiplier = 2.0;
  std::chrono::milliseconds max_delay{5000};
  /// Relative jitter applied to each delay, in [0, 1).
  double jitter = 0.2;
};

/// Delay before retry number `attempt` (1-based), jittered from `jitter_key`.
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt,
                                        std::uint64_t jitter_key);

/// Runs `fn` until it succeeds, throws a non-transient error, or the attempt
/// budget is spent. Transient errors are Transport and BackendRejected with an
/// HTTP status of 429/502/503/504.
nlohmann::json with_retry(const RetryPolicy& policy, std::uint64_t jitter_key,
                          const std::function<nlohmann::json()>& fn);

/// Client for the /v1/ground and /v1/attention wire protocol.
class HttpBackend final : public GroundingBackend {
 public:
  /// `base_url` like "http://127.0.0.1:8080".
  explicit HttpBackend(std::string base_url, RetryPolicy retry = {},
                       std::chrono::seconds timeout = std::chrono::seconds(120));

  GroundingReply ground(const GroundingRequest& req) const override;
  RawAttentionRows attention(const AttentionRequest& req) const override;

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body,
                      std::uint64_t jitter_key) const;

  std::string base_url_;
  RetryPolicy retry_;
  std::chrono::seconds timeout_;
};

// Wire-format helpers, shared with tests and fixture tooling.
nlohmann::json ground_request_json(const std::string& image_png, const std::string& instruction,
                                   const nlohmann::json& params);
nlohmann::json attention_request_json(const std::string& image_png, const std::string& instruction,
                                      int layer, QueryMode mode);
nlohmann::json attention_response_json(const RawAttentionRows& raw);
/// Validates shape and types; throws Protocol on any mismatch.
RawAttentionRows attention_from_json(const nlohmann::json& j);

}  // namespace mvp
