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

#include <cmath>
#include <thread>

#include "doctest.h"
#include "mvp/attention.hpp"
#include "mvp/backend/mock.hpp"
#include "mvp/view_proposal.hpp"

using namespace mvp;

namespace {

View crop_view(int id, Rect r, double alpha) {
  View v;
  v.id = id;
  v.rect = r;
  v.alpha = alpha;
  v.source = ViewSource::AttentionCrop;
  return v;
}

const ImageDims kUhd{3840, 2160};

}  // namespace

TEST_CASE("target outside the view is never hit") {
  MockModelSpec spec;
  spec.q_lo = spec.q_hi = 1.0;
  const View v = crop_view(1, {0, 0, 1280, 720}, 2.0);
  const Rect gt{2000, 1500, 40, 40};
  for (std::uint64_t call = 0; call < 2000; ++call) {
    const Point p = mock_predict(spec, v, gt, call, kUhd);
    CHECK_FALSE(point_in_rect(view_to_full(p, v), gt));
    CHECK(point_in_rect(view_to_full(p, v), v.rect));
  }
}

TEST_CASE("saturated target area hits at q_hi within a binomial band") {
  MockModelSpec spec;  // q_hi = 0.9, area_ref = 2500
  const View v = crop_view(2, {1000, 800, 1280, 720}, 1.0);
  const Rect gt{1500, 1000, 60, 50};  // 3000 px^2 >= area_ref
  int hits = 0;
  const int n = 10000;
  for (std::uint64_t call = 0; call < n; ++call)
    hits += point_in_rect(view_to_full(mock_predict(spec, v, gt, call, kUhd), v), gt);
  // 3 sigma for p = 0.9 is 0.009; stray hits from the wrong branch add ~0.0003.
  CHECK(std::abs(double(hits) / n - 0.9) <= 0.009 + 0.0005);
}

TEST_CASE("hit rate grows with the area the model sees") {
  MockModelSpec spec;
  const Rect gt{1500, 1000, 20, 20};  // 400 px^2
  auto rate = [&](double alpha) {
    const View v = crop_view(1, {1000, 800, 1280, 720}, alpha);
    int hits = 0;
    for (std::uint64_t call = 0; call < 10000; ++call)
      hits += point_in_rect(view_to_full(mock_predict(spec, v, gt, call, kUhd), v), gt);
    return hits / 10000.0;
  };
  // q = 0.25 + 0.65 * 400/2500 = 0.354 at alpha 1; 0.25 + 0.65 * 1600/2500 = 0.666 at alpha 2.
  CHECK(std::abs(rate(1.0) - 0.354) <= 0.015);
  CHECK(std::abs(rate(2.0) - 0.666) <= 0.015);
}

TEST_CASE("mock predictions are keyed, not stateful") {
  MockModelSpec spec;
  spec.seed = 9;
  const View v = crop_view(3, {0, 0, 1280, 720}, 2.0);
  const Rect gt{100, 100, 30, 30};
  const Point a = mock_predict(spec, v, gt, 5, kUhd);
  CHECK(mock_predict(spec, v, gt, 5, kUhd).xy == a.xy);
  int same = 0;
  for (std::uint64_t call = 6; call < 50; ++call) same += mock_predict(spec, v, gt, call, kUhd).xy == a.xy;
  CHECK(same < 5);

  // Content keying only matters when enabled.
  CHECK(mock_predict(spec, v, gt, 5, kUhd, 111).xy == mock_predict(spec, v, gt, 5, kUhd, 222).xy);
  spec.key_on_content = true;
  int differ = 0;
  for (std::uint64_t call = 0; call < 50; ++call)
    differ += mock_predict(spec, v, gt, call, kUhd, 111).xy != mock_predict(spec, v, gt, call, kUhd, 222).xy;
  CHECK(differ > 25);
}

TEST_CASE("wrong points cover the whole image in UniformInImage mode") {
  MockModelSpec spec;
  spec.q_lo = spec.q_hi = 0.0;
  spec.wrong_mode = WrongMode::UniformInImage;
  const View v = crop_view(1, {0, 0, 1280, 720}, 2.0);
  int outside = 0;
  for (std::uint64_t call = 0; call < 1000; ++call) {
    const Point full = view_to_full(mock_predict(spec, v, Rect{10, 10, 5, 5}, call, kUhd), v);
    CHECK(point_in_rect(full, {0, 0, 3840, 2160}));
    outside += !point_in_rect(full, v.rect);
  }
  // The view covers 1/9 of the image.
  CHECK(std::abs(outside / 1000.0 - 8.0 / 9.0) < 0.05);
}

TEST_CASE("border padding does not move a content-insensitive mock") {
  MockModelSpec spec;
  const View plain = original_view({1920, 1080});
  View bordered = plain;
  bordered.pad = {28, 28, 28, 28};
  const Rect gt{600, 400, 25, 25};
  for (std::uint64_t call = 0; call < 500; ++call) {
    const Point a = view_to_full(mock_predict(spec, plain, gt, call, {1920, 1080}), plain);
    const Point b = view_to_full(mock_predict(spec, bordered, gt, call, {1920, 1080}), bordered);
    CHECK(a.xy == b.xy);
  }
}

TEST_CASE("MockBackend ground") {
  MockModelSpec spec;
  spec.q_lo = spec.q_hi = 1.0;
  MockBackend backend(spec);
  GroundingRequest req;
  req.instruction = "click save";
  req.context.view = crop_view(1, {0, 0, 1280, 720}, 2.0);
  req.context.source_dims = kUhd;
  req.context.gt = Rect{300, 300, 20, 10};
  for (std::uint64_t call = 0; call < 200; ++call) {
    req.context.call_idx = call;
    const auto reply = backend.ground(req);
    CHECK(reply.parsed.view_id == 1);
    CHECK(point_in_rect(view_to_full(reply.parsed, req.context.view), *req.context.gt));
  }

  spec.q_lo = spec.q_hi = 0.0;
  MockBackend wrong(spec);
  req.context.call_idx = 17;
  const auto first = wrong.ground(req);
  CHECK(wrong.ground(req).raw_text == first.raw_text);
  CHECK(point_in_rect(view_to_full(first.parsed, req.context.view), req.context.view.rect));
}

TEST_CASE("MockBackend is safe to call concurrently") {
  MockBackend backend(MockModelSpec{});
  GroundingRequest req;
  req.instruction = "x";
  req.context.view = original_view(kUhd);
  req.context.source_dims = kUhd;
  req.context.gt = Rect{100, 100, 50, 50};
  std::vector<std::string> serial(64), parallel(64);
  for (int i = 0; i < 64; ++i) {
    auto r = req;
    r.context.call_idx = std::uint64_t(i);
    serial[i] = backend.ground(r).raw_text;
  }
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = t; i < 64; i += 4) {
        auto r = req;
        r.context.call_idx = std::uint64_t(i);
        parallel[i] = backend.ground(r).raw_text;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(serial == parallel);
}

TEST_CASE("mock attention peaks on the target") {
  MockModelSpec spec;
  const Rect gt{2000, 1200, 30, 20};
  const RawAttentionRows raw = mock_attention(spec, kUhd, gt, 3);
  CHECK(raw.grid == PatchGrid{78, 138, 28, 28});
  CHECK(raw.heads() == spec.heads);
  CHECK(raw.tokens() == raw.grid.size());
  const AttentionScores s = mean_heads(raw);
  CHECK(std::abs(s.scores.sum() - 1.0) < 1e-6);
  const int best = top_k_tokens(s, 1).front();
  CHECK((patch_center(raw.grid, best).xy - Eigen::Vector2d(2015, 1210)).norm() < 40);

  const auto views = propose_views(s, kUhd, MvpConfig{});
  REQUIRE(views.size() == 4);
  for (const auto& v : views) CHECK(v.rect.contains(gt));

  spec.attention_available = false;
  MockBackend backend(spec);
  AttentionRequest req;
  req.context.source_dims = kUhd;
  try {
    backend.attention(req);
    FAIL("expected AttentionUnavailable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AttentionUnavailable);
  }
}

TEST_CASE("mock spec json and validation") {
  MockModelSpec spec;
  spec.seed = 77;
  spec.wrong_mode = WrongMode::UniformInImage;
  spec.key_on_content = true;
  const MockModelSpec back = mock_spec_from_json(nlohmann::json::parse(to_json(spec).dump()));
  CHECK(back.seed == 77);
  CHECK(back.wrong_mode == WrongMode::UniformInImage);
  CHECK(back.key_on_content);
  CHECK_THROWS_AS(mock_spec_from_json({{"q_lo", 0.9}, {"q_hi", 0.1}}), Error);
  CHECK_THROWS_AS(MockBackend(MockModelSpec{.area_ref = 0}), Error);
  CHECK(format_point(12, 34.5) == "(12, 34.5)");
}
