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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mvp/geometry.hpp"

namespace mvp {

/// 8-bit interleaved RGB raster.
struct Image {
  ImageDims dims;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  explicit Image(ImageDims d, std::uint8_t fill = 0)
      : dims(d), rgb(std::size_t(d.width) * d.height * 3, fill) {}

  std::uint8_t* pixel(int x, int y) { return &rgb[(std::size_t(y) * dims.width + x) * 3]; }
  const std::uint8_t* pixel(int x, int y) const {
    return &rgb[(std::size_t(y) * dims.width + x) * 3];
  }
};

Image decode_png(std::string_view bytes);
std::string encode_png(const Image& img);
Image load_png(const std::filesystem::path& path);
void save_png(const Image& img, const std::filesystem::path& path);
/// Reads only the PNG header.
ImageDims read_png_dims(const std::filesystem::path& path);

std::string base64_encode(std::string_view bytes);
/// Throws Protocol on malformed input.
std::string base64_decode(std::string_view text);

Image crop(const Image& img, const Rect& r);
/// Bilinear resampling with pixel-centre alignment.
Image resize_bilinear(const Image& img, ImageDims out);
/// Black border of the given widths around the image.
Image pad(const Image& img, const Padding& p);

/// The canvas a view sends to the model: crop, resize by alpha, pad.
Image materialize_view(const Image& img, const View& view);

std::uint64_t fingerprint(const Image& img);

}  // namespace mvp
