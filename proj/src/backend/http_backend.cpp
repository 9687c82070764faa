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

#include "mvp/backend/http_backend.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "httplib.h"
#include "mvp/rng.hpp"

namespace mvp {
namespace {

// Status codes worth another attempt.
bool transient_status(int status) {
  return status == 429 || status == 502 || status == 503 || status == 504;
}

class HttpStatusError : public Error {
 public:
  HttpStatusError(int status, const std::string& message)
      : Error(ErrorCode::BackendRejected, message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

std::string error_body(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (!j.is_discarded() && j.is_object() && j.contains("error") && j["error"].is_string()) {
    return j["error"].get<std::string>();
  }
  return body;
}

}  // namespace

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt,
                                        std::uint64_t jitter_key) {
  const double base = double(policy.base_delay.count()) * std::pow(policy.multiplier, attempt - 1);
  const double capped = std::min(base, double(policy.max_delay.count()));
  KeyedRng rng({jitter_key, std::uint64_t(attempt)});
  const double factor = 1.0 + policy.jitter * (2.0 * rng.uniform01() - 1.0);
  return std::chrono::milliseconds(static_cast<long>(std::lround(capped * factor)));
}

nlohmann::json with_retry(const RetryPolicy& policy, std::uint64_t jitter_key,
                          const std::function<nlohmann::json()>& fn) {
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      return fn();
    } catch (const HttpStatusError& e) {
      if (!transient_status(e.status()) || attempt >= attempts) throw;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Transport) throw;
      if (attempt >= attempts) {
        throw Error(ErrorCode::Transport, std::string(e.what()) + " (after " +
                                              std::to_string(attempts) + " attempts)");
      }
    }
    std::this_thread::sleep_for(backoff_delay(policy, attempt, jitter_key));
  }
}

HttpBackend::HttpBackend(std::string base_url, RetryPolicy retry, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)), retry_(retry), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

nlohmann::json HttpBackend::post(const std::string& path, const nlohmann::json& body,
                                 std::uint64_t jitter_key) const {
  const std::string payload = body.dump();
  return with_retry(retry_, jitter_key, [&]() -> nlohmann::json {
    // One client per call keeps concurrent requests independent.
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      throw Error(ErrorCode::Transport, base_url_ + path + ": " + httplib::to_string(res.error()));
    }
    if (res->status == 404 || res->status == 501) {
      if (path == "/v1/attention") {
        throw Error(ErrorCode::AttentionUnavailable, error_body(res->body));
      }
    }
    if (res->status < 200 || res->status >= 300) {
      throw HttpStatusError(res->status, "HTTP " + std::to_string(res->status) + " from " +
                                             path + ": " + error_body(res->body));
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::Protocol, path + " returned invalid JSON");
    return j;
  });
}

GroundingReply HttpBackend::ground(const GroundingRequest& req) const {
  if (!req.image) throw Error(ErrorCode::InvalidArgument, "HTTP backend needs image pixels");
  const auto body = ground_request_json(encode_png(*req.image), req.instruction, req.decode_params);
  const auto j = post("/v1/ground", body, mix_key({req.context.call_idx, 1}));
  if (!j.is_object() || !j.contains("raw_text") || !j["raw_text"].is_string()) {
    throw Error(ErrorCode::Protocol, "/v1/ground response lacks raw_text");
  }
  GroundingReply reply;
  reply.raw_text = j["raw_text"].get<std::string>();
  reply.parsed = parse_reply(reply.raw_text, req.context.view.id);
  return reply;
}

RawAttentionRows HttpBackend::attention(const AttentionRequest& req) const {
  if (!req.image) throw Error(ErrorCode::InvalidArgument, "HTTP backend needs image pixels");
  const auto body =
      attention_request_json(encode_png(*req.image), req.instruction, req.layer, req.query_mode);
  return attention_from_json(post("/v1/attention", body, mix_key({req.context.call_idx, 2})));
}

nlohmann::json ground_request_json(const std::string& image_png, const std::string& instruction,
                                   const nlohmann::json& params) {
  return {{"image_b64", base64_encode(image_png)},
          {"instruction", instruction},
          {"params", params.is_null() ? nlohmann::json::object() : params}};
}

nlohmann::json attention_request_json(const std::string& image_png, const std::string& instruction,
                                      int layer, QueryMode mode) {
  return {{"image_b64", base64_encode(image_png)},
          {"instruction", instruction},
          {"layer", layer},
          {"query_mode", to_string(mode)}};
}

nlohmann::json attention_response_json(const RawAttentionRows& raw) {
  nlohmann::json values = nlohmann::json::array();
  for (int h = 0; h < raw.heads(); ++h)
    for (int t = 0; t < raw.tokens(); ++t) values.push_back(raw.values(h, t));
  return {{"grid",
           {{"rows", raw.grid.rows},
            {"cols", raw.grid.cols},
            {"patch_w", raw.grid.patch_w},
            {"patch_h", raw.grid.patch_h}}},
          {"kind", to_string(raw.kind)},
          {"heads", raw.heads()},
          {"values", values}};
}

RawAttentionRows attention_from_json(const nlohmann::json& j) {
  try {
    RawAttentionRows raw;
    const auto& g = j.at("grid");
    raw.grid = {g.at("rows").get<int>(), g.at("cols").get<int>(), g.at("patch_w").get<int>(),
                g.at("patch_h").get<int>()};
    if (raw.grid.rows < 1 || raw.grid.cols < 1 || raw.grid.patch_w < 1 || raw.grid.patch_h < 1) {
      throw Error(ErrorCode::Protocol, "attention grid must be positive");
    }
    raw.kind = attention_kind_from_string(j.at("kind").get<std::string>());
    const int heads = j.at("heads").get<int>();
    const auto& values = j.at("values");
    const std::size_t tokens = std::size_t(raw.grid.size());
    if (heads < 1 || !values.is_array() || values.size() != std::size_t(heads) * tokens) {
      throw Error(ErrorCode::Protocol, "attention values do not match heads x rows x cols");
    }
    raw.values.resize(heads, static_cast<Eigen::Index>(tokens));
    for (int h = 0; h < heads; ++h)
      for (std::size_t t = 0; t < tokens; ++t)
        raw.values(h, static_cast<Eigen::Index>(t)) = values[h * tokens + t].get<double>();
    raw.model_dim = j.value("model_dim", 0);
    return raw;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Protocol, std::string("malformed attention response: ") + e.what());
  }
}

}  // namespace mvp
