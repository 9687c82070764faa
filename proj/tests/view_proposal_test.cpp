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

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "doctest.h"
#include "mvp/rng.hpp"
#include "mvp/view_proposal.hpp"

using namespace mvp;

namespace {

struct OracleView {
  Rect rect;
  int rank;
  int seed;
};

// Literal re-execution of the proposal procedure with no shared helpers.
std::vector<OracleView> oracle_propose(const Eigen::VectorXd& scores, const PatchGrid& g,
                                       ImageDims dims, int w, int h, int k, int m) {
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < scores.size(); ++i) order.push_back({-scores[i], i});
  std::sort(order.begin(), order.end());
  order.resize(std::min<std::size_t>(order.size(), std::size_t(k)));

  std::vector<std::pair<double, double>> centers;
  for (auto [neg, t] : order)
    centers.push_back({(t % g.cols + 0.5) * g.patch_w, (t / g.cols + 0.5) * g.patch_h});

  std::map<std::tuple<int, int, int, int>, OracleView> seen;
  std::vector<std::tuple<int, double, int, Rect>> ranked;
  for (std::size_t i = 0; i < order.size(); ++i) {
    Rect r{0, 0, dims.width, dims.height};
    if (dims.width >= w && dims.height >= h) {
      int x = int(std::floor(centers[i].first - w / 2.0 + 0.5));
      int y = int(std::floor(centers[i].second - h / 2.0 + 0.5));
      if (x < 0) x = 0;
      if (y < 0) y = 0;
      if (x + w > dims.width) x = dims.width - w;
      if (y + h > dims.height) y = dims.height - h;
      r = {x, y, w, h};
    }
    const auto key = std::make_tuple(r.x, r.y, r.w, r.h);
    if (seen.count(key)) continue;
    int rank = 0;
    for (auto [cx, cy] : centers)
      rank += (r.x <= cx && cx < r.x + r.w && r.y <= cy && cy < r.y + r.h);
    seen[key] = {r, rank, order[i].second};
    ranked.push_back({-rank, order[i].first, order[i].second, r});
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a), std::get<2>(a)) <
           std::tie(std::get<0>(b), std::get<1>(b), std::get<2>(b));
  });
  std::vector<OracleView> out;
  for (std::size_t i = 0; i < ranked.size() && int(i) < m; ++i)
    out.push_back({std::get<3>(ranked[i]), -std::get<0>(ranked[i]), std::get<2>(ranked[i])});
  return out;
}

AttentionScores normalized(const PatchGrid& g, Eigen::VectorXd v) {
  return {g, v / v.sum()};
}

}  // namespace

TEST_CASE("hand-executed 2x4 fixture") {
  // Seeds at (320,180) and (960,180): the first clamps to the origin, the
  // second already fits at x=320. Both windows hold both centres (rank 2) and
  // the higher seed score orders them.
  const PatchGrid grid{2, 4, 640, 360};
  Eigen::VectorXd s(8);
  s << 0.5, 0.3, 0.04, 0.04, 0.04, 0.04, 0.02, 0.02;
  MvpConfig cfg;
  cfg.k = 2;
  cfg.m = 2;
  const auto views = propose_views({grid, s}, {2560, 720}, cfg);
  REQUIRE(views.size() == 2);
  CHECK(views[0].rect == Rect{0, 0, 1280, 720});
  CHECK(views[0].rank == 2);
  CHECK(views[0].seed_token == 0);
  CHECK(views[0].id == 1);
  CHECK(views[1].rect == Rect{320, 0, 1280, 720});
  CHECK(views[1].rank == 2);
  CHECK(views[1].seed_token == 1);
  CHECK(views[1].id == 2);
  for (const auto& v : views) {
    CHECK(v.alpha == 2.0);
    CHECK(v.source == ViewSource::AttentionCrop);
  }

  const auto oracle = oracle_propose(s, grid, {2560, 720}, 1280, 720, 2, 2);
  REQUIRE(oracle.size() == 2);
  CHECK(oracle[0].rect == views[0].rect);
  CHECK(oracle[1].rect == views[1].rect);
}

TEST_CASE("corner seeds collapse to one window") {
  const PatchGrid grid{2, 4, 640, 360};
  Eigen::VectorXd s(8);
  s << 0.5, 0.1, 0.05, 0.05, 0.2, 0.04, 0.03, 0.03;  // tokens 0 and 4 share column 0
  MvpConfig cfg;
  cfg.k = 2;
  cfg.m = 4;
  const auto views = propose_views({grid, s}, {2560, 720}, cfg);
  REQUIRE(views.size() == 1);
  CHECK(views[0].rect == Rect{0, 0, 1280, 720});
  CHECK(views[0].rank == 2);
}

TEST_CASE("window holding every top-k centre comes first with rank k") {
  const PatchGrid grid{20, 40, 28, 28};
  Eigen::VectorXd s = Eigen::VectorXd::Constant(grid.size(), 1e-4);
  // A tight 3x3 block of high scores.
  for (int r = 9; r < 12; ++r)
    for (int c = 20; c < 23; ++c) s[r * grid.cols + c] = 1.0 + r + c;
  MvpConfig cfg;
  cfg.view_w = 200;
  cfg.view_h = 200;
  cfg.k = 9;
  cfg.m = 3;
  const auto views = propose_views(normalized(grid, s), {1120, 560}, cfg);
  REQUIRE(!views.empty());
  CHECK(views[0].rank == 9);
}

TEST_CASE("k=1 yields a single view even when m is larger") {
  const PatchGrid grid{10, 10, 28, 28};
  Eigen::VectorXd s = Eigen::VectorXd::Constant(grid.size(), 1.0);
  s[55] = 5.0;
  MvpConfig cfg;
  cfg.view_w = 100;
  cfg.view_h = 100;
  cfg.k = 1;
  cfg.m = 4;
  auto views = propose_views(normalized(grid, s), {280, 280}, cfg);
  CHECK(views.size() == 1);
  cfg.k = 4;
  cfg.m = 4;
  s.setConstant(0.0);
  s[55] = 1.0;  // remaining top-k are ties broken by index
  views = propose_views({grid, s}, {280, 280}, cfg);
  CHECK(views.size() <= 4);
}

TEST_CASE("single nonzero entry with k=1: the chosen window holds the peak") {
  KeyedRng rng({5});
  for (int trial = 0; trial < 200; ++trial) {
    const PatchGrid grid{int(30 + rng.uniform_index(50)), int(40 + rng.uniform_index(100)), 28, 28};
    const ImageDims dims{grid.cols * 28, grid.rows * 28};
    Eigen::VectorXd s = Eigen::VectorXd::Zero(grid.size());
    const int peak = int(rng.uniform_index(std::uint64_t(grid.size())));
    s[peak] = 1.0;
    MvpConfig cfg;
    cfg.k = 1;
    cfg.m = 1;
    const auto views = propose_views({grid, s}, dims, cfg);
    REQUIRE(views.size() == 1);
    CHECK(point_in_rect(patch_center(grid, peak), views[0].rect));
  }
}

TEST_CASE("single nonzero entry with large k can lose to zero-score ties") {
  // Zero-score tokens fill top-k in index order (the top row), so a window on
  // the top row outranks the isolated peak at the bottom.
  const PatchGrid grid{77, 137, 28, 28};
  Eigen::VectorXd s = Eigen::VectorXd::Zero(grid.size());
  const int peak = 76 * 137 + 136;
  s[peak] = 1.0;
  const auto views = propose_views({grid, s}, {3836, 2156}, MvpConfig{});
  REQUIRE(!views.empty());
  CHECK_FALSE(point_in_rect(patch_center(grid, peak), views[0].rect));
}

TEST_CASE("matches the brute-force oracle on random score maps") {
  KeyedRng rng({99});
  for (int trial = 0; trial < 300; ++trial) {
    const int patch = 14 + int(rng.uniform_index(30));
    const PatchGrid grid{int(3 + rng.uniform_index(40)), int(3 + rng.uniform_index(60)), patch, patch};
    const ImageDims dims{grid.cols * patch - int(rng.uniform_index(std::uint64_t(patch))),
                         grid.rows * patch - int(rng.uniform_index(std::uint64_t(patch)))};
    Eigen::VectorXd s(grid.size());
    for (int i = 0; i < s.size(); ++i) s[i] = double(rng.uniform_index(20));  // many ties
    MvpConfig cfg;
    cfg.view_w = 1 + int(rng.uniform_index(std::uint64_t(dims.width + 200)));
    cfg.view_h = 1 + int(rng.uniform_index(std::uint64_t(dims.height + 200)));
    cfg.m = 1 + int(rng.uniform_index(6));
    cfg.k = cfg.m + int(rng.uniform_index(60));
    const auto views = propose_views({grid, s}, dims, cfg);
    const auto oracle = oracle_propose(s, grid, dims, cfg.view_w, cfg.view_h, cfg.k, cfg.m);
    REQUIRE(views.size() == oracle.size());
    for (std::size_t i = 0; i < views.size(); ++i) {
      CHECK(views[i].rect == oracle[i].rect);
      CHECK(views[i].rank == oracle[i].rank);
      CHECK(views[i].seed_token == oracle[i].seed);
    }
    // Invariants.
    std::set<std::tuple<int, int, int, int>> rects;
    for (std::size_t i = 0; i < views.size(); ++i) {
      const auto& v = views[i];
      CHECK(Rect{0, 0, dims.width, dims.height}.contains(v.rect));
      if (dims.width >= cfg.view_w && dims.height >= cfg.view_h) {
        CHECK(v.rect.w == cfg.view_w);
        CHECK(v.rect.h == cfg.view_h);
      }
      CHECK(v.rank <= cfg.k);
      if (i > 0) CHECK(views[i - 1].rank >= v.rank);
      CHECK(rects.insert({v.rect.x, v.rect.y, v.rect.w, v.rect.h}).second);
    }
    CHECK(propose_views({grid, s}, dims, cfg) == views);
  }
}

TEST_CASE("grid must cover the image") {
  const PatchGrid grid{2, 2, 28, 28};
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(4, 0.25);
  CHECK_THROWS_AS(propose_views({grid, s}, {1000, 1000}, MvpConfig{}), Error);
  CHECK_THROWS_AS(propose_views({grid, Eigen::VectorXd::Constant(3, 1.0 / 3)}, {56, 56}, MvpConfig{}),
                  Error);
}

TEST_CASE("border_pad_views") {
  MvpConfig cfg;
  const auto views = border_pad_views({1280, 720}, cfg);
  REQUIRE(views.size() == 4);
  std::set<PadSide> sides;
  for (const auto& v : views) {
    CHECK(v.alpha == 1.0);
    CHECK(v.source == ViewSource::BorderPad);
    CHECK(v.rect == Rect{0, 0, 1280, 720});
    sides.insert(v.side);
  }
  CHECK(sides.size() == 4);

  const View& left = views[0];
  CHECK(left.side == PadSide::Left);
  CHECK(left.canvas_dims() == ImageDims{1308, 720});
  CHECK(view_to_full(Point::in_view(left.id, 100, 50), left).xy == Eigen::Vector2d(72, 50));

  const View& bottom = views[3];
  CHECK(bottom.side == PadSide::Bottom);
  CHECK(bottom.canvas_dims() == ImageDims{1280, 748});
  CHECK(view_to_full(Point::in_view(bottom.id, 100, 50), bottom).xy == Eigen::Vector2d(100, 50));

  const View& top = views[2];
  CHECK(view_to_full(Point::in_view(top.id, 100, 50), top).xy == Eigen::Vector2d(100, 22));
}

TEST_CASE("containing_ratio") {
  std::vector<View> views(2);
  views[0].rect = {0, 0, 100, 100};
  views[1].rect = {50, 50, 100, 100};
  CHECK(containing_ratio(views, {10, 10, 5, 5}) == 1.0);
  CHECK(containing_ratio(views, {60, 60, 10, 10}) == 1.0);
  CHECK(containing_ratio(views, {90, 10, 20, 20}) == 0.0);  // straddles, not contained
  CHECK(containing_ratio(views, {500, 500, 5, 5}) == 0.0);
  CHECK_THROWS_AS(containing_ratio(std::vector<View>{}, {0, 0, 1, 1}), Error);
}
