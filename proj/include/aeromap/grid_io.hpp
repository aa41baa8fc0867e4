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

#include <filesystem>
#include <string_view>

#include "aeromap/grid.hpp"

namespace aeromap {

/// ESRI ASCII grid of one layer: six header lines, "NODATA_value -9999",
/// values with six decimals, rows from north to south.
void write_ascii_grid(const std::filesystem::path& path, const LayeredGrid& grid, std::string_view layer_name);

/// Reads an ESRI ASCII grid into a single layer named `layer_name`.
LayeredGrid read_ascii_grid(const std::filesystem::path& path, std::string_view layer_name = layer::kElevation);

/// Six-line world file for a north-up raster whose pixels are grid cells.
void write_world_file(const std::filesystem::path& path, const LayeredGrid& grid);

/// color_r/g/b layers as RGBA PNG (alpha 0 where 'valid' is not set) plus a
/// world file next to it with extension ".pgw".
void write_color_raster(const std::filesystem::path& png_path, const LayeredGrid& grid);

/// One layer as 16-bit gray PNG (values rounded and clamped) plus world file.
void write_layer_raster16(const std::filesystem::path& png_path, const LayeredGrid& grid, std::string_view layer_name);

/// Valid cells as colored ASCII PLY vertices (cell center, elevation).
void write_ply(const std::filesystem::path& path, const LayeredGrid& grid);

}  // namespace aeromap
