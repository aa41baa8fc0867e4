// Copyright 2026 The aeromap Authors
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

#include "aeromap/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "aeromap/errors.hpp"

namespace aeromap {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

void write_rows(const std::filesystem::path& path, int width, int height, int color_type, int bit_depth,
                const std::vector<png_bytep>& rows) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to write " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

std::uint8_t to_byte(double value) {
  if (!(value > 0.0)) return 0;
  if (value >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(value));
}

Eigen::Vector3d Image::sample_bilinear(double u, double v) const {
  const int x0 = std::clamp(static_cast<int>(std::floor(u)), 0, std::max(0, width_ - 2));
  const int y0 = std::clamp(static_cast<int>(std::floor(v)), 0, std::max(0, height_ - 2));
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const auto* p00 = pixel(x0, y0);
  const auto* p10 = pixel(x1, y0);
  const auto* p01 = pixel(x0, y1);
  const auto* p11 = pixel(x1, y1);
  Eigen::Vector3d out;
  for (int c = 0; c < 3; ++c) {
    const double top = p00[c] + fx * (p10[c] - p00[c]);
    const double bottom = p01[c] + fx * (p11[c] - p01[c]);
    out[c] = top + fy * (bottom - top);
  }
  return out;
}

Image read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  if (png_get_rowbytes(png, info) != static_cast<std::size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported PNG layout in " + path.string());
  }
  Image image(width, height);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = image.pixel(0, y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  std::vector<png_bytep> rows(image.height());
  for (int y = 0; y < image.height(); ++y) rows[y] = const_cast<png_bytep>(image.pixel(0, y));
  write_rows(path, image.width(), image.height(), PNG_COLOR_TYPE_RGB, 8, rows);
}

void write_png_rgba(const std::filesystem::path& path, const Image& image, const std::vector<std::uint8_t>& alpha) {
  std::vector<std::uint8_t> buffer(std::size_t(image.width()) * image.height() * 4);
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      const std::size_t i = std::size_t(y) * image.width() + x;
      const auto* p = image.pixel(x, y);
      std::copy(p, p + 3, buffer.begin() + i * 4);
      buffer[i * 4 + 3] = alpha[i];
    }
  std::vector<png_bytep> rows(image.height());
  for (int y = 0; y < image.height(); ++y) rows[y] = buffer.data() + std::size_t(y) * image.width() * 4;
  write_rows(path, image.width(), image.height(), PNG_COLOR_TYPE_RGBA, 8, rows);
}

void write_png_gray16(const std::filesystem::path& path, int width, int height,
                      const std::vector<std::uint16_t>& values) {
  std::vector<std::uint16_t> buffer = values;
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = reinterpret_cast<png_bytep>(buffer.data() + std::size_t(y) * width);
  write_rows(path, width, height, PNG_COLOR_TYPE_GRAY, 16, rows);
}

}  // namespace aeromap
