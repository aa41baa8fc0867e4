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

#include "aeromap/grid_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "aeromap/errors.hpp"
#include "aeromap/image.hpp"

namespace aeromap {
namespace {

constexpr double kAsciiNoData = -9999.0;

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

void write_ascii_grid(const std::filesystem::path& path, const LayeredGrid& grid, std::string_view layer_name) {
  const auto& raster = grid.layer(layer_name);
  const Eigen::Vector2d origin = grid.origin();
  std::ofstream out = open_out(path);
  out << "ncols " << grid.cols() << "\n"
      << "nrows " << grid.rows() << "\n"
      << "xllcorner " << format_fixed(origin.x(), 9) << "\n"
      << "yllcorner " << format_fixed(origin.y(), 9) << "\n"
      << "cellsize " << format_fixed(grid.gsd(), 12) << "\n"
      << "NODATA_value -9999\n";
  std::string line;
  for (int r = grid.rows() - 1; r >= 0; --r) {
    line.clear();
    for (int c = 0; c < grid.cols(); ++c) {
      if (c) line += ' ';
      const double v = raster(r, c);
      line += LayeredGrid::is_no_data(v) ? std::string("-9999") : format_fixed(v, 6);
    }
    out << line << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

LayeredGrid read_ascii_grid(const std::filesystem::path& path, std::string_view layer_name) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::map<std::string, std::string> header;
  for (int i = 0; i < 6; ++i) {
    std::string key, value;
    if (!(in >> key >> value)) throw IoError("truncated ASCII grid header in " + path.string());
    for (auto& ch : key) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    header[key] = value;
  }
  for (const char* key : {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"})
    if (!header.count(key)) throw IoError(std::string("ASCII grid misses ") + key);
  const int cols = std::stoi(header["ncols"]);
  const int rows = std::stoi(header["nrows"]);
  const double nodata = std::stod(header["nodata_value"]);
  LayeredGrid grid({std::stod(header["xllcorner"]), std::stod(header["yllcorner"])}, std::stod(header["cellsize"]), 0,
                   0, rows, cols);
  auto& raster = grid.add_layer(layer_name);
  for (int r = rows - 1; r >= 0; --r)
    for (int c = 0; c < cols; ++c) {
      std::string token;
      if (!(in >> token)) throw IoError("truncated ASCII grid body in " + path.string());
      const double v = std::stod(token);
      raster(r, c) = v == nodata ? LayeredGrid::no_data() : v;
    }
  return grid;
}

void write_world_file(const std::filesystem::path& path, const LayeredGrid& grid) {
  const RegionOfInterest ext = grid.extent();
  const double g = grid.gsd();
  std::ofstream out = open_out(path);
  out << format_fixed(g, 12) << "\n"
      << format_fixed(0.0, 12) << "\n"
      << format_fixed(0.0, 12) << "\n"
      << format_fixed(-g, 12) << "\n"
      << format_fixed(ext.min_easting + 0.5 * g, 9) << "\n"
      << format_fixed(ext.max_northing - 0.5 * g, 9) << "\n";
}

void write_color_raster(const std::filesystem::path& png_path, const LayeredGrid& grid) {
  const auto& r = grid.layer(layer::kColorR);
  const auto& g = grid.layer(layer::kColorG);
  const auto& b = grid.layer(layer::kColorB);
  Image image(grid.cols(), grid.rows());
  std::vector<std::uint8_t> alpha(std::size_t(grid.cols()) * grid.rows(), 0);
  for (int row = 0; row < grid.rows(); ++row) {
    const int y = grid.rows() - 1 - row;
    for (int col = 0; col < grid.cols(); ++col) {
      if (!grid.valid(row, col) || LayeredGrid::is_no_data(r(row, col))) continue;
      image.set(col, y, {to_byte(r(row, col)), to_byte(g(row, col)), to_byte(b(row, col))});
      alpha[std::size_t(y) * grid.cols() + col] = 255;
    }
  }
  write_png_rgba(png_path, image, alpha);
  auto world = png_path;
  world.replace_extension(".pgw");
  write_world_file(world, grid);
}

void write_layer_raster16(const std::filesystem::path& png_path, const LayeredGrid& grid,
                          std::string_view layer_name) {
  const auto& raster = grid.layer(layer_name);
  std::vector<std::uint16_t> values(std::size_t(grid.cols()) * grid.rows(), 0);
  for (int row = 0; row < grid.rows(); ++row)
    for (int col = 0; col < grid.cols(); ++col) {
      const double v = raster(row, col);
      if (LayeredGrid::is_no_data(v)) continue;
      values[std::size_t(grid.rows() - 1 - row) * grid.cols() + col] =
          static_cast<std::uint16_t>(std::clamp(std::lround(v), 0L, 65535L));
    }
  write_png_gray16(png_path, grid.cols(), grid.rows(), values);
  auto world = png_path;
  world.replace_extension(".pgw");
  write_world_file(world, grid);
}

void write_ply(const std::filesystem::path& path, const LayeredGrid& grid) {
  const auto& elevation = grid.layer(layer::kElevation);
  const bool has_color = grid.has_layer(layer::kColorR);
  std::size_t count = 0;
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c)
      if (grid.valid(r, c) && !LayeredGrid::is_no_data(elevation(r, c))) ++count;

  std::ofstream out = open_out(path);
  out << "ply\nformat ascii 1.0\nelement vertex " << count << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  for (int r = 0; r < grid.rows(); ++r)
    for (int c = 0; c < grid.cols(); ++c) {
      if (!grid.valid(r, c) || LayeredGrid::is_no_data(elevation(r, c))) continue;
      const Eigen::Vector2d p = grid.cell_center(r, c);
      int red = 0, green = 0, blue = 0;
      if (has_color && !LayeredGrid::is_no_data(grid.layer(layer::kColorR)(r, c))) {
        red = to_byte(grid.layer(layer::kColorR)(r, c));
        green = to_byte(grid.layer(layer::kColorG)(r, c));
        blue = to_byte(grid.layer(layer::kColorB)(r, c));
      }
      out << format_fixed(p.x(), 3) << ' ' << format_fixed(p.y(), 3) << ' ' << format_fixed(elevation(r, c), 3) << ' '
          << red << ' ' << green << ' ' << blue << '\n';
    }
}

}  // namespace aeromap
