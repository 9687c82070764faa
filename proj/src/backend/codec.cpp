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

#include "mvp/backend/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>
#include <png.h>

#include "mvp/rng.hpp"

namespace mvp {

Image decode_png(std::string_view bytes) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::Io, std::string("png decode: ") + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image img(ImageDims{static_cast<int>(png.width), static_cast<int>(png.height)});
  if (!png_image_finish_read(&png, nullptr, img.rgb.data(), 0, nullptr)) {
    png_image_free(&png);
    throw Error(ErrorCode::Io, std::string("png decode: ") + png.message);
  }
  return img;
}

std::string encode_png(const Image& img) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = img.dims.width;
  png.height = img.dims.height;
  png.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(png, size, 0, img.rgb.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png encode: ") + png.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, img.rgb.data(), 0, nullptr)) {
    throw Error(ErrorCode::Io, std::string("png encode: ") + png.message);
  }
  out.resize(size);
  return out;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Image load_png(const std::filesystem::path& path) { return decode_png(read_file(path)); }

void save_png(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  const std::string bytes = encode_png(img);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

ImageDims read_png_dims(const std::filesystem::path& path) {
  // Signature (8) + IHDR length/type (8) + width (4) + height (4).
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  unsigned char head[24];
  if (!in.read(reinterpret_cast<char*>(head), sizeof(head)) ||
      png_sig_cmp(head, 0, 8) != 0 || std::memcmp(head + 12, "IHDR", 4) != 0) {
    throw Error(ErrorCode::Io, path.string() + " is not a PNG file");
  }
  auto be32 = [](const unsigned char* p) {
    return int((std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
               (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]));
  };
  return {be32(head + 16), be32(head + 20)};
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(n);
  return out;
}

std::string base64_decode(std::string_view text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  if (clean.size() % 4 != 0) throw Error(ErrorCode::Protocol, "base64 length is not a multiple of 4");
  if (clean.empty()) return {};
  std::string out(3 * clean.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(clean.data()),
                                static_cast<int>(clean.size()));
  if (n < 0) throw Error(ErrorCode::Protocol, "invalid base64");
  std::size_t padding = 0;
  if (clean.back() == '=') ++padding;
  if (clean[clean.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

Image crop(const Image& img, const Rect& r) {
  const Rect bounds{0, 0, img.dims.width, img.dims.height};
  if (!bounds.contains(r) || empty(r)) throw Error(ErrorCode::InvalidArgument, "crop outside image");
  Image out(ImageDims{r.w, r.h});
  for (int y = 0; y < r.h; ++y) {
    std::memcpy(out.pixel(0, y), img.pixel(r.x, r.y + y), std::size_t(r.w) * 3);
  }
  return out;
}

Image resize_bilinear(const Image& img, ImageDims out_dims) {
  if (out_dims == img.dims) return img;
  Image out(out_dims);
  const double sx = double(img.dims.width) / out_dims.width;
  const double sy = double(img.dims.height) / out_dims.height;
  const int max_x = img.dims.width - 1;
  const int max_y = img.dims.height - 1;
  for (int y = 0; y < out_dims.height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, double(max_y));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, max_y);
    const double wy = fy - y0;
    for (int x = 0; x < out_dims.width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, double(max_x));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, max_x);
      const double wx = fx - x0;
      std::uint8_t* dst = out.pixel(x, y);
      for (int c = 0; c < 3; ++c) {
        const double top = img.pixel(x0, y0)[c] * (1 - wx) + img.pixel(x1, y0)[c] * wx;
        const double bot = img.pixel(x0, y1)[c] * (1 - wx) + img.pixel(x1, y1)[c] * wx;
        dst[c] = static_cast<std::uint8_t>(std::lround(top * (1 - wy) + bot * wy));
      }
    }
  }
  return out;
}

Image pad(const Image& img, const Padding& p) {
  if (p == Padding{}) return img;
  Image out(ImageDims{img.dims.width + p.left + p.right, img.dims.height + p.top + p.bottom}, 0);
  for (int y = 0; y < img.dims.height; ++y) {
    std::memcpy(out.pixel(p.left, p.top + y), img.pixel(0, y), std::size_t(img.dims.width) * 3);
  }
  return out;
}

Image materialize_view(const Image& img, const View& view) {
  const Rect full{0, 0, img.dims.width, img.dims.height};
  Image content = view.rect == full ? img : crop(img, view.rect);
  const ImageDims scaled{static_cast<int>(std::lround(view.rect.w * view.alpha)),
                         static_cast<int>(std::lround(view.rect.h * view.alpha))};
  return pad(resize_bilinear(content, scaled), view.pad);
}

std::uint64_t fingerprint(const Image& img) {
  return mix_key({fnv1a64(std::span<const std::uint8_t>(img.rgb)), std::uint64_t(img.dims.width),
                  std::uint64_t(img.dims.height)});
}

}  // namespace mvp
