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

#include "mvp/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace mvp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::NoCoordinateFound: return "NoCoordinateFound";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::BackendRejected: return "BackendRejected";
    case ErrorCode::Protocol: return "Protocol";
    case ErrorCode::AllBackendCallsFailed: return "AllBackendCallsFailed";
    case ErrorCode::AttentionUnavailable: return "AttentionUnavailable";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Dataset: return "Dataset";
  }
  return "Unknown";
}

Rect intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.right(), b.right());
  const int y1 = std::min(a.bottom(), b.bottom());
  return {x0, y0, std::max(0, x1 - x0), std::max(0, y1 - y0)};
}

ImageDims View::canvas_dims() const {
  const int w = static_cast<int>(std::lround(rect.w * alpha));
  const int h = static_cast<int>(std::lround(rect.h * alpha));
  return {w + pad.left + pad.right, h + pad.top + pad.bottom};
}

View original_view(ImageDims dims) {
  View v;
  v.id = 0;
  v.rect = {0, 0, dims.width, dims.height};
  return v;
}

Point patch_center(const PatchGrid& grid, int token_idx) {
  if (token_idx < 0 || token_idx >= grid.size()) {
    throw Error(ErrorCode::OutOfRange, "token index " + std::to_string(token_idx) +
                                           " outside grid of " + std::to_string(grid.size()));
  }
  const int row = token_idx / grid.cols;
  const int col = token_idx % grid.cols;
  return Point::full((col + 0.5) * grid.patch_w, (row + 0.5) * grid.patch_h);
}

Rect clamp_crop(const Point& center, int w, int h, ImageDims dims) {
  if (w < 1 || h < 1) throw Error(ErrorCode::InvalidArgument, "crop size must be positive");
  if (dims.width < w || dims.height < h) return {0, 0, dims.width, dims.height};
  // Round half up so that integral centres with even sizes stay exact.
  const int x = static_cast<int>(std::floor(center.x() - w / 2.0 + 0.5));
  const int y = static_cast<int>(std::floor(center.y() - h / 2.0 + 0.5));
  return {std::clamp(x, 0, dims.width - w), std::clamp(y, 0, dims.height - h), w, h};
}

Point view_to_full(const Point& p, const View& view) {
  if (p.frame != Frame::View || p.view_id != view.id) {
    throw Error(ErrorCode::FrameMismatch,
                "point is not in the frame of view " + std::to_string(view.id));
  }
  if (!(view.alpha > 0)) throw Error(ErrorCode::InvalidArgument, "view alpha must be positive");
  return Point::full(view.rect.x + (p.x() - view.pad.left) / view.alpha,
                     view.rect.y + (p.y() - view.pad.top) / view.alpha);
}

Point full_to_view(const Point& p, const View& view) {
  if (p.frame != Frame::FullImage) {
    throw Error(ErrorCode::FrameMismatch, "expected a full-image point");
  }
  return Point::in_view(view.id, (p.x() - view.rect.x) * view.alpha + view.pad.left,
                        (p.y() - view.rect.y) * view.alpha + view.pad.top);
}

bool point_in_rect(const Point& p, const Rect& r) {
  return r.x <= p.x() && p.x() < r.right() && r.y <= p.y() && p.y() < r.bottom();
}

const char* to_string(ViewSource s) {
  switch (s) {
    case ViewSource::Original: return "original";
    case ViewSource::AttentionCrop: return "attention_crop";
    case ViewSource::BorderPad: return "border_pad";
  }
  return "original";
}

const char* to_string(PadSide s) {
  switch (s) {
    case PadSide::None: return "none";
    case PadSide::Left: return "left";
    case PadSide::Right: return "right";
    case PadSide::Top: return "top";
    case PadSide::Bottom: return "bottom";
    case PadSide::All: return "all";
  }
  return "none";
}

ViewSource view_source_from_string(const std::string& s) {
  if (s == "original") return ViewSource::Original;
  if (s == "attention_crop") return ViewSource::AttentionCrop;
  if (s == "border_pad") return ViewSource::BorderPad;
  throw Error(ErrorCode::InvalidArgument, "unknown view source '" + s + "'");
}

PadSide pad_side_from_string(const std::string& s) {
  for (PadSide side : {PadSide::None, PadSide::Left, PadSide::Right, PadSide::Top,
                       PadSide::Bottom, PadSide::All}) {
    if (s == to_string(side)) return side;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown pad side '" + s + "'");
}

}  // namespace mvp
