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

#include "doctest.h"
#include "mvp/geometry.hpp"
#include "mvp/rng.hpp"

using namespace mvp;

TEST_CASE("patch_center is row-major") {
  const PatchGrid grid{2, 4, 28, 28};
  CHECK(patch_center(grid, 0).xy == Eigen::Vector2d(14, 14));
  CHECK(patch_center(grid, 5).xy == Eigen::Vector2d(42, 42));
  CHECK(patch_center({1, 1, 100, 50}, 0).xy == Eigen::Vector2d(50, 25));
  CHECK(patch_center(grid, 0).frame == Frame::FullImage);
  CHECK_THROWS_AS(patch_center(grid, 8), Error);
  CHECK_THROWS_AS(patch_center(grid, -1), Error);
}

TEST_CASE("patch_center is a bijection onto grid cells") {
  const PatchGrid grid{7, 11, 28, 14};
  for (int i = 0; i < grid.size(); ++i) {
    const Point c = patch_center(grid, i);
    const int col = static_cast<int>(c.x() / grid.patch_w);
    const int row = static_cast<int>(c.y() / grid.patch_h);
    CHECK(row * grid.cols + col == i);
  }
}

TEST_CASE("clamp_crop") {
  const ImageDims uhd{3840, 2160};
  CHECK(clamp_crop(Point::full(100, 100), 1280, 720, uhd) == Rect{0, 0, 1280, 720});
  CHECK(clamp_crop(Point::full(1920, 1080), 1280, 720, uhd) == Rect{1280, 720, 1280, 720});
  CHECK(clamp_crop(Point::full(500, 300), 1280, 720, {1000, 600}) == Rect{0, 0, 1000, 600});
  CHECK(clamp_crop(Point::full(3800, 2100), 1280, 720, uhd) == Rect{2560, 1440, 1280, 720});
  // Only one axis too small still yields the whole image.
  CHECK(clamp_crop(Point::full(10, 10), 1280, 720, {2000, 700}) == Rect{0, 0, 2000, 700});
}

TEST_CASE("clamp_crop properties over random centres") {
  KeyedRng rng({42});
  for (int trial = 0; trial < 2000; ++trial) {
    const ImageDims dims{400 + int(rng.uniform_index(4000)), 300 + int(rng.uniform_index(2500))};
    const int w = 1 + int(rng.uniform_index(1500));
    const int h = 1 + int(rng.uniform_index(900));
    const Point c = Point::full(rng.uniform01() * dims.width, rng.uniform01() * dims.height);
    const Rect r = clamp_crop(c, w, h, dims);
    const Rect image{0, 0, dims.width, dims.height};
    REQUIRE(image.contains(r));
    if (dims.width >= w && dims.height >= h) {
      CHECK(r.w == w);
      CHECK(r.h == h);
      const int x = int(std::floor(c.x() - w / 2.0 + 0.5));
      const int y = int(std::floor(c.y() - h / 2.0 + 0.5));
      if (image.contains(Rect{x, y, w, h})) CHECK(r == Rect{x, y, w, h});
    } else {
      CHECK(r == image);
    }
  }
}

TEST_CASE("view_to_full") {
  View v;
  v.id = 3;
  v.rect = {100, 200, 1280, 720};
  v.alpha = 2;
  CHECK(view_to_full(Point::in_view(3, 50, 60), v).xy == Eigen::Vector2d(125, 230));
  CHECK(view_to_full(Point::in_view(3, 0, 0), v).xy == Eigen::Vector2d(100, 200));
  View corner;
  corner.id = 1;
  corner.rect = {0, 0, 1280, 720};
  corner.alpha = 2;
  CHECK(view_to_full(Point::in_view(1, 2560, 1440), corner).xy == Eigen::Vector2d(1280, 720));

  CHECK_THROWS_AS(view_to_full(Point::in_view(4, 0, 0), v), Error);
  CHECK_THROWS_AS(view_to_full(Point::full(0, 0), v), Error);
}

TEST_CASE("full_to_view inverts view_to_full inside the view") {
  KeyedRng rng({7});
  for (int trial = 0; trial < 1000; ++trial) {
    View v;
    v.id = int(rng.uniform_index(9));
    v.rect = {int(rng.uniform_index(3000)), int(rng.uniform_index(2000)),
              1 + int(rng.uniform_index(1500)), 1 + int(rng.uniform_index(900))};
    v.alpha = 1.0 + 3.0 * rng.uniform01();
    v.pad = {int(rng.uniform_index(40)), int(rng.uniform_index(40)), 0, 0};
    const Point q = Point::full(v.rect.x + rng.uniform01() * v.rect.w,
                                v.rect.y + rng.uniform01() * v.rect.h);
    const Point back = view_to_full(full_to_view(q, v), v);
    CHECK((back.xy - q.xy).norm() <= 1e-9);
  }
}

TEST_CASE("point_in_rect is half-open") {
  CHECK(point_in_rect(Point::full(5, 5), {0, 0, 10, 10}));
  CHECK_FALSE(point_in_rect(Point::full(10, 5), {0, 0, 10, 10}));
  CHECK_FALSE(point_in_rect(Point::full(5, 10), {0, 0, 10, 10}));
  CHECK(point_in_rect(Point::full(0, 0), {0, 0, 1, 1}));
  CHECK_FALSE(point_in_rect(Point::full(-0.001, 0), {0, 0, 1, 1}));
}

TEST_CASE("intersect and canvas size") {
  CHECK(intersect({0, 0, 10, 10}, {5, 5, 10, 10}) == Rect{5, 5, 5, 5});
  CHECK(empty(intersect({0, 0, 10, 10}, {20, 20, 5, 5})));
  View v = original_view({1280, 720});
  v.pad = {28, 0, 0, 0};
  CHECK(v.canvas_dims() == ImageDims{1308, 720});
  View crop;
  crop.rect = {0, 0, 1280, 720};
  crop.alpha = 2;
  CHECK(crop.canvas_dims() == ImageDims{2560, 1440});
}
