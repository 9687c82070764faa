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
#include <optional>

#include "json.hpp"
#include "mvp/backend/backend.hpp"

namespace mvp {

enum class WrongMode { UniformInView, UniformInImage };

/// Synthetic grounding model whose hit probability grows with the visible
/// target area (in the pixels the model sees) and saturates at area_ref.
struct MockModelSpec {
  std::uint64_t seed = 0;
  double q_lo = 0.25;
  double q_hi = 0.9;
  double area_ref = 2500.0;
  WrongMode wrong_mode = WrongMode::UniformInView;
  /// Mix the view's content fingerprint into the PRNG key, making the model
  /// sensitive to pixel-level perturbations.
  bool key_on_content = false;

  // Synthetic attention: a Gaussian bump of logits over the patch grid.
  bool attention_available = true;
  int patch_size = 28;
  int heads = 2;
  double attn_sigma_px = 56.0;
  /// Probability the bump sits on the target; otherwise it lands uniformly.
  double attn_hit_prob = 1.0;
  double attn_noise = 0.05;

  void validate() const;
};

/// One prediction in the view frame. The stream is keyed on
/// (seed, view.id, call_idx[, content_key]), so concurrent calls share no
/// state. Points are integer pixels of the source image.
Point mock_predict(const MockModelSpec& spec, const View& view, std::optional<Rect> gt,
                   std::uint64_t call_idx, ImageDims image, std::uint64_t content_key = 0);

/// Synthetic attention logits for a screenshot of `image` dims.
RawAttentionRows mock_attention(const MockModelSpec& spec, ImageDims image, std::optional<Rect> gt,
                                std::uint64_t call_idx);

class MockBackend final : public GroundingBackend {
 public:
  explicit MockBackend(MockModelSpec spec);

  GroundingReply ground(const GroundingRequest& req) const override;
  RawAttentionRows attention(const AttentionRequest& req) const override;
  bool needs_pixels() const override { return false; }

  const MockModelSpec& spec() const { return spec_; }

 private:
  MockModelSpec spec_;
};

nlohmann::ordered_json to_json(const MockModelSpec& spec);
MockModelSpec mock_spec_from_json(const nlohmann::json& j, MockModelSpec base = {});

/// Shortest round-trip decimal text for a coordinate pair, "(x, y)".
std::string format_point(double x, double y);

}  // namespace mvp
