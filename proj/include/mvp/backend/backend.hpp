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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "mvp/attention.hpp"
#include "mvp/backend/codec.hpp"
#include "mvp/config.hpp"
#include "mvp/geometry.hpp"

namespace mvp {

/// Side information about the call that never goes on the wire. Test doubles
/// use it to model the screenshot and the target; HTTP backends ignore it.
struct CallContext {
  View view;
  ImageDims source_dims;
  std::optional<Rect> gt;
  std::uint64_t call_idx = 0;
  /// Fingerprint of the view's image content.
  std::uint64_t content_key = 0;
};

struct GroundingRequest {
  /// Materialized view canvas; may be null for backends that do not need pixels.
  std::shared_ptr<const Image> image;
  std::string instruction;
  nlohmann::json decode_params = nlohmann::json::object();
  CallContext context;
};

struct GroundingReply {
  std::string raw_text;
  Point parsed;  // view frame of context.view
};

struct AttentionRequest {
  std::shared_ptr<const Image> image;
  std::string instruction;
  int layer = 20;
  QueryMode query_mode = QueryMode::Comma;
  CallContext context;
};

/// A grounding model behind some transport. Implementations must accept
/// concurrent calls.
class GroundingBackend {
 public:
  virtual ~GroundingBackend() = default;

  /// Throws Error with Transport, BackendRejected or NoCoordinateFound.
  virtual GroundingReply ground(const GroundingRequest& req) const = 0;
  /// Throws AttentionUnavailable when the backend cannot serve attention.
  virtual RawAttentionRows attention(const AttentionRequest& req) const = 0;
  /// Whether requests must carry materialized pixels.
  virtual bool needs_pixels() const { return true; }
};

/// Parses `raw_text` into a view-frame point, or throws NoCoordinateFound.
Point parse_reply(const std::string& raw_text, int view_id);

}  // namespace mvp
