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
#include <string>

#include <Eigen/Core>

#include "mvp/error.hpp"

namespace mvp {

struct ImageDims {
  int width = 0;
  int height = 0;

  int min_side() const { return width < height ? width : height; }
  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

enum class Frame { FullImage, View };

/// A pixel location tagged with the frame it is expressed in. View-frame
/// points also carry the id of the view they belong to.
template <typename Scalar>
struct BasicPoint {
  using Vec = Eigen::Matrix<Scalar, 2, 1>;

  Vec xy = Vec::Zero();
  Frame frame = Frame::FullImage;
  int view_id = -1;

  Scalar x() const { return xy.x(); }
  Scalar y() const { return xy.y(); }

  static BasicPoint full(Scalar x, Scalar y) { return {Vec(x, y), Frame::FullImage, -1}; }
  static BasicPoint in_view(int id, Scalar x, Scalar y) { return {Vec(x, y), Frame::View, id}; }
};

using Point = BasicPoint<double>;

/// Integer pixel rectangle, top-left anchored, half-open on the far edges.
struct Rect {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  int right() const { return x + w; }
  int bottom() const { return y + h; }
  std::int64_t area() const { return std::int64_t(w) * h; }
  bool contains(const Rect& other) const {
    return other.x >= x && other.y >= y && other.right() <= right() && other.bottom() <= bottom();
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Intersection of two rects; w or h is 0 when they do not overlap.
Rect intersect(const Rect& a, const Rect& b);
inline bool empty(const Rect& r) { return r.w <= 0 || r.h <= 0; }

struct PatchGrid {
  int rows = 0;
  int cols = 0;
  int patch_w = 1;
  int patch_h = 1;

  int size() const { return rows * cols; }
  friend bool operator==(const PatchGrid&, const PatchGrid&) = default;
};

struct Padding {
  int left = 0;
  int top = 0;
  int right = 0;
  int bottom = 0;

  friend bool operator==(const Padding&, const Padding&) = default;
};

enum class ViewSource { Original, AttentionCrop, BorderPad };
enum class PadSide { None, Left, Right, Top, Bottom, All };

/// One model input derived from the screenshot. `rect` is the image content
/// in the full-image frame; the canvas sent to the model is rect scaled by
/// alpha and extended by `pad`.
struct View {
  int id = 0;
  Rect rect;
  double alpha = 1.0;
  int rank = 0;
  ViewSource source = ViewSource::Original;
  PadSide side = PadSide::None;
  Padding pad;
  int seed_token = -1;
  double seed_score = 0.0;

  ImageDims canvas_dims() const;
  friend bool operator==(const View&, const View&) = default;
};

View original_view(ImageDims dims);

Point patch_center(const PatchGrid& grid, int token_idx);

/// w x h window centred on `center`, translated the minimum amount needed to
/// sit inside the image. Falls back to the whole image when it is smaller
/// than the window on either axis.
Rect clamp_crop(const Point& center, int w, int h, ImageDims dims);

Point view_to_full(const Point& p, const View& view);
Point full_to_view(const Point& p, const View& view);

bool point_in_rect(const Point& p, const Rect& r);

const char* to_string(ViewSource s);
const char* to_string(PadSide s);
ViewSource view_source_from_string(const std::string& s);
PadSide pad_side_from_string(const std::string& s);

}  // namespace mvp
