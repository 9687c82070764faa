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

#include "mvp/backend/mock.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mvp/backend/parse.hpp"
#include "mvp/rng.hpp"

namespace mvp {

Point parse_reply(const std::string& raw_text, int view_id) {
  const auto xy = parse_coordinates(raw_text);
  if (!xy) throw Error(ErrorCode::NoCoordinateFound, "no coordinate in \"" + raw_text + "\"");
  return Point::in_view(view_id, xy->x(), xy->y());
}

void MockModelSpec::validate() const {
  if (!(0 <= q_lo && q_lo <= q_hi && q_hi <= 1)) {
    throw Error(ErrorCode::InvalidArgument, "mock needs 0 <= q_lo <= q_hi <= 1");
  }
  if (!(area_ref > 0)) throw Error(ErrorCode::InvalidArgument, "mock area_ref must be positive");
  if (patch_size < 1 || heads < 1 || !(attn_sigma_px > 0)) {
    throw Error(ErrorCode::InvalidArgument, "bad mock attention parameters");
  }
}

Point mock_predict(const MockModelSpec& spec, const View& view, std::optional<Rect> gt,
                   std::uint64_t call_idx, ImageDims image, std::uint64_t content_key) {
  KeyedRng rng = spec.key_on_content
                     ? KeyedRng({spec.seed, std::uint64_t(view.id), call_idx, content_key})
                     : KeyedRng({spec.seed, std::uint64_t(view.id), call_idx});
  const Rect bounds{0, 0, image.width, image.height};
  const Rect content = intersect(view.rect, bounds);
  const Rect visible = gt ? intersect(*gt, content) : Rect{0, 0, 0, 0};

  double q = 0.0;
  if (!empty(visible)) {
    const double seen_area = double(visible.area()) * view.alpha * view.alpha;
    q = spec.q_lo + (spec.q_hi - spec.q_lo) * std::min(1.0, seen_area / spec.area_ref);
  }

  const bool correct = rng.uniform01() < q;
  const Rect region = correct ? visible
                      : spec.wrong_mode == WrongMode::UniformInImage ? bounds
                                                                      : content;
  const auto x = region.x + static_cast<int>(rng.uniform_index(std::uint64_t(region.w)));
  const auto y = region.y + static_cast<int>(rng.uniform_index(std::uint64_t(region.h)));
  return full_to_view(Point::full(x, y), view);
}

RawAttentionRows mock_attention(const MockModelSpec& spec, ImageDims image, std::optional<Rect> gt,
                                std::uint64_t call_idx) {
  KeyedRng rng({spec.seed, call_idx, 0xa77e7710ULL});
  const int p = spec.patch_size;
  RawAttentionRows raw;
  raw.grid = {(image.height + p - 1) / p, (image.width + p - 1) / p, p, p};
  raw.kind = AttentionKind::Logits;
  raw.model_dim = 128;

  const bool on_target = gt.has_value() && rng.uniform01() < spec.attn_hit_prob;
  const double ux = rng.uniform01();
  const double uy = rng.uniform01();
  const Eigen::Vector2d bump = on_target ? Eigen::Vector2d(gt->x + gt->w / 2.0, gt->y + gt->h / 2.0)
                                         : Eigen::Vector2d(ux * image.width, uy * image.height);

  const double inv_two_var = 1.0 / (2.0 * spec.attn_sigma_px * spec.attn_sigma_px);
  raw.values.resize(spec.heads, raw.grid.size());
  for (int j = 0; j < raw.grid.size(); ++j) {
    const double d2 = (patch_center(raw.grid, j).xy - bump).squaredNorm();
    for (int h = 0; h < spec.heads; ++h) {
      raw.values(h, j) = -d2 * inv_two_var + spec.attn_noise * (rng.uniform01() - 0.5);
    }
  }
  return raw;
}

MockBackend::MockBackend(MockModelSpec spec) : spec_(spec) { spec_.validate(); }

GroundingReply MockBackend::ground(const GroundingRequest& req) const {
  const CallContext& ctx = req.context;
  const Point p =
      mock_predict(spec_, ctx.view, ctx.gt, ctx.call_idx, ctx.source_dims, ctx.content_key);
  GroundingReply reply;
  reply.raw_text = format_point(p.x(), p.y());
  reply.parsed = parse_reply(reply.raw_text, ctx.view.id);
  return reply;
}

RawAttentionRows MockBackend::attention(const AttentionRequest& req) const {
  if (!spec_.attention_available) {
    throw Error(ErrorCode::AttentionUnavailable, "mock configured without attention");
  }
  return mock_attention(spec_, req.context.source_dims, req.context.gt, req.context.call_idx);
}

std::string format_point(double x, double y) {
  char buf[64];
  auto put = [&](char* at, double v) { return std::to_chars(at, buf + sizeof(buf), v).ptr; };
  char* end = buf;
  *end++ = '(';
  end = put(end, x);
  *end++ = ',';
  *end++ = ' ';
  end = put(end, y);
  *end++ = ')';
  return std::string(buf, end);
}

nlohmann::ordered_json to_json(const MockModelSpec& s) {
  nlohmann::ordered_json j;
  j["seed"] = s.seed;
  j["q_lo"] = s.q_lo;
  j["q_hi"] = s.q_hi;
  j["area_ref"] = s.area_ref;
  j["wrong_mode"] = s.wrong_mode == WrongMode::UniformInImage ? "uniform_in_image" : "uniform_in_view";
  j["key_on_content"] = s.key_on_content;
  j["attention_available"] = s.attention_available;
  j["patch_size"] = s.patch_size;
  j["heads"] = s.heads;
  j["attn_sigma_px"] = s.attn_sigma_px;
  j["attn_hit_prob"] = s.attn_hit_prob;
  j["attn_noise"] = s.attn_noise;
  return j;
}

MockModelSpec mock_spec_from_json(const nlohmann::json& j, MockModelSpec s) {
  try {
    s.seed = j.value("seed", s.seed);
    s.q_lo = j.value("q_lo", s.q_lo);
    s.q_hi = j.value("q_hi", s.q_hi);
    s.area_ref = j.value("area_ref", s.area_ref);
    if (j.contains("wrong_mode")) {
      const std::string mode = j.at("wrong_mode");
      if (mode == "uniform_in_image") {
        s.wrong_mode = WrongMode::UniformInImage;
      } else if (mode == "uniform_in_view") {
        s.wrong_mode = WrongMode::UniformInView;
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown wrong_mode '" + mode + "'");
      }
    }
    s.key_on_content = j.value("key_on_content", s.key_on_content);
    s.attention_available = j.value("attention_available", s.attention_available);
    s.patch_size = j.value("patch_size", s.patch_size);
    s.heads = j.value("heads", s.heads);
    s.attn_sigma_px = j.value("attn_sigma_px", s.attn_sigma_px);
    s.attn_hit_prob = j.value("attn_hit_prob", s.attn_hit_prob);
    s.attn_noise = j.value("attn_noise", s.attn_noise);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad mock spec: ") + e.what());
  }
  s.validate();
  return s;
}

}  // namespace mvp
