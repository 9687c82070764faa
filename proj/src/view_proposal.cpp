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

#include "mvp/view_proposal.hpp"

#include <algorithm>

namespace mvp {
namespace {

void check_grid_covers(const PatchGrid& grid, ImageDims dims) {
  const bool cols_ok = grid.cols * grid.patch_w >= dims.width - grid.patch_w &&
                       grid.cols * grid.patch_w <= dims.width + grid.patch_w;
  const bool rows_ok = grid.rows * grid.patch_h >= dims.height - grid.patch_h &&
                       grid.rows * grid.patch_h <= dims.height + grid.patch_h;
  if (grid.patch_w < 1 || grid.patch_h < 1 || !cols_ok || !rows_ok) {
    throw Error(ErrorCode::InvalidArgument,
                "patch grid " + std::to_string(grid.cols) + "x" + std::to_string(grid.rows) +
                    " does not cover a " + std::to_string(dims.width) + "x" +
                    std::to_string(dims.height) + " image");
  }
}

}  // namespace

std::vector<View> propose_views(const AttentionScores& scores, ImageDims dims,
                                const MvpConfig& cfg) {
  cfg.validate();
  check_grid_covers(scores.grid, dims);
  if (scores.scores.size() != scores.grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "score vector does not match its grid");
  }
  if (cfg.m == 0) return {};

  const std::vector<int> top = top_k_tokens(scores, cfg.k);
  std::vector<Point> centers;
  centers.reserve(top.size());
  for (int t : top) centers.push_back(patch_center(scores.grid, t));

  std::vector<View> candidates;
  for (std::size_t i = 0; i < top.size(); ++i) {
    const Rect r = clamp_crop(centers[i], cfg.view_w, cfg.view_h, dims);
    // Seeds arrive in descending score order, so the first seed of a
    // duplicate rect is also its best one.
    if (std::any_of(candidates.begin(), candidates.end(),
                    [&](const View& v) { return v.rect == r; }))
      continue;
    View v;
    v.rect = r;
    v.alpha = cfg.alpha;
    v.source = ViewSource::AttentionCrop;
    v.seed_token = top[i];
    v.seed_score = scores.scores[top[i]];
    v.rank = static_cast<int>(std::count_if(centers.begin(), centers.end(),
                                            [&](const Point& c) { return point_in_rect(c, r); }));
    candidates.push_back(v);
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const View& a, const View& b) {
    if (a.rank != b.rank) return a.rank > b.rank;
    if (a.seed_score != b.seed_score) return a.seed_score > b.seed_score;
    return a.seed_token < b.seed_token;
  });
  if (static_cast<int>(candidates.size()) > cfg.m) candidates.resize(cfg.m);
  for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].id = static_cast<int>(i) + 1;
  return candidates;
}

std::vector<View> border_pad_views(ImageDims dims, const MvpConfig& cfg) {
  const int b = cfg.border_px;
  const std::pair<PadSide, Padding> sides[] = {
      {PadSide::Left, {b, 0, 0, 0}},
      {PadSide::Right, {0, 0, b, 0}},
      {PadSide::Top, {0, b, 0, 0}},
      {PadSide::Bottom, {0, 0, 0, b}},
  };
  std::vector<View> views;
  for (const auto& [side, pad] : sides) {
    View v = original_view(dims);
    v.id = static_cast<int>(views.size()) + 1;
    v.source = ViewSource::BorderPad;
    v.side = side;
    v.pad = pad;
    views.push_back(v);
  }
  return views;
}

double containing_ratio(std::span<const View> views, const Rect& gt) {
  if (views.empty()) throw Error(ErrorCode::InvalidArgument, "no views to test");
  return std::any_of(views.begin(), views.end(), [&](const View& v) { return v.rect.contains(gt); })
             ? 1.0
             : 0.0;
}

}  // namespace mvp
