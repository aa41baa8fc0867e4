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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace aeromap {

/// Interleaved 8-bit RGB raster, row 0 at the top.
class Image {
 public:
  Image() = default;
  Image(int width, int height) : width_(width), height_(height), data_(std::size_t(width) * height * 3, 0) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t* pixel(int x, int y) { return data_.data() + (std::size_t(y) * width_ + x) * 3; }
  const std::uint8_t* pixel(int x, int y) const { return data_.data() + (std::size_t(y) * width_ + x) * 3; }
  std::array<std::uint8_t, 3> rgb(int x, int y) const {
    const auto* p = pixel(x, y);
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, const std::array<std::uint8_t, 3>& c) {
    auto* p = pixel(x, y);
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  /// Bilinear lookup at a sub-pixel position. Requires 0 <= u <= width-1 and
  /// 0 <= v <= height-1.
  Eigen::Vector3d sample_bilinear(double u, double v) const;

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  bool operator==(const Image& other) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

std::uint8_t to_byte(double value);

/// Reads 8/16-bit gray, gray+alpha, RGB or RGBA PNG; gray is replicated to
/// three channels and alpha dropped.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);
/// RGBA output; `alpha` holds one byte per pixel.
void write_png_rgba(const std::filesystem::path& path, const Image& image, const std::vector<std::uint8_t>& alpha);
/// Single channel 16-bit output, row 0 at the top.
void write_png_gray16(const std::filesystem::path& path, int width, int height,
                      const std::vector<std::uint16_t>& values);

}  // namespace aeromap
