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

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "aeromap/exec.hpp"
#include "aeromap/geodesy.hpp"

namespace aeromap {

namespace layer {
inline constexpr std::string_view kElevation = "elevation";
inline constexpr std::string_view kValid = "valid";
inline constexpr std::string_view kVariance = "elevation_variance";
inline constexpr std::string_view kHypothesis = "elevation_hypothesis";
inline constexpr std::string_view kObservations = "num_observations";
inline constexpr std::string_view kColorR = "color_r";
inline constexpr std::string_view kColorG = "color_g";
inline constexpr std::string_view kColorB = "color_b";
inline constexpr std::string_view kAngle = "observation_angle";
// Bookkeeping for the two elevation tracks of a cell.
inline constexpr std::string_view kElevationCount = "elevation_observations";
inline constexpr std::string_view kHypothesisCount = "hypothesis_observations";
inline constexpr std::string_view kHypothesisVariance = "hypothesis_variance";
inline constexpr std::string_view kHypothesisColorR = "hypothesis_color_r";
inline constexpr std::string_view kHypothesisColorG = "hypothesis_color_g";
inline constexpr std::string_view kHypothesisColorB = "hypothesis_color_b";
inline constexpr std::string_view kHypothesisAngle = "hypothesis_angle";
}  // namespace layer

enum class Interpolation { Nearest, Bilinear };

/// Continuous layers (elevation, color, angle, variance) are bilinear,
/// masks and counters nearest.
Interpolation default_interpolation(std::string_view layer_name);

struct CellIndex {
  int row = 0;
  int col = 0;
};

/// UTM-anchored stack of equally sized rasters.
///
/// Cell (i, j) covers [origin_e + j*gsd, origin_e + (j+1)*gsd) x
/// [origin_n + i*gsd, origin_n + (i+1)*gsd); row 0 is the southern edge. The
/// origin is stored as a lattice anchor plus integer cell offsets, so grids
/// sharing an anchor and gsd line up exactly and growth never drifts.
class LayeredGrid {
 public:
  using Raster = Eigen::ArrayXXd;

  static double no_data() { return std::numeric_limits<double>::quiet_NaN(); }
  static bool is_no_data(double v) { return std::isnan(v); }

  LayeredGrid() = default;
  LayeredGrid(const Eigen::Vector2d& anchor, double gsd, std::int64_t row_offset, std::int64_t col_offset, int rows,
              int cols);

  const Eigen::Vector2d& anchor() const { return anchor_; }
  std::int64_t row_offset() const { return row_offset_; }
  std::int64_t col_offset() const { return col_offset_; }
  double gsd() const { return gsd_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Eigen::Vector2d origin() const;
  RegionOfInterest extent() const;
  Eigen::Vector2d cell_center(int row, int col) const;
  std::optional<CellIndex> cell_at(double easting, double northing) const;

  bool has_layer(std::string_view name) const;
  /// Adds a layer filled with `fill`; an existing layer is returned untouched.
  Raster& add_layer(std::string_view name, double fill = no_data());
  void remove_layer(std::string_view name);
  Raster& layer(std::string_view name);
  const Raster& layer(std::string_view name) const;
  std::vector<std::string> layer_names() const;

  /// True when the 'valid' layer exists and is set at (row, col).
  bool valid(int row, int col) const;
  std::size_t count_valid() const;

  /// Copy of the cells [row, row+rows) x [col, col+cols).
  LayeredGrid window(int row, int col, int rows, int cols) const;

 private:
  Eigen::Vector2d anchor_ = Eigen::Vector2d::Zero();
  double gsd_ = 1.0;
  std::int64_t row_offset_ = 0;
  std::int64_t col_offset_ = 0;
  int rows_ = 0;
  int cols_ = 0;
  std::map<std::string, Raster, std::less<>> layers_;
};

/// Grid over `roi` with its origin at the roi's lower-left corner and
/// ceil(extent / gsd) cells per axis (at least one).
LayeredGrid create(const RegionOfInterest& roi, double gsd, const std::vector<std::string>& layer_names);

/// Like create(), but the origin is snapped down onto the lattice
/// anchor + k * gsd and the far edge snapped up.
LayeredGrid create_aligned(const RegionOfInterest& roi, double gsd, const std::vector<std::string>& layer_names,
                           const Eigen::Vector2d& lattice_anchor);

/// Grid covering the union of `grid` and `roi` on the same lattice. Old cells
/// keep their values bit-exactly; new cells are no-data. With chunk > 1 every
/// side that grows is extended to a multiple of `chunk` cells.
LayeredGrid grow(const LayeredGrid& grid, const RegionOfInterest& roi, int chunk = 1);

using InterpolationPolicy = Interpolation (*)(std::string_view);

/// Resamples every layer onto cells of `new_gsd` covering the same extent.
/// Without an anchor the origin is kept; with one the result lies on that
/// lattice. Bilinear sampling ignores no-data neighbours.
LayeredGrid resample(const LayeredGrid& grid, double new_gsd, InterpolationPolicy policy = default_interpolation,
                     std::optional<Eigen::Vector2d> lattice_anchor = std::nullopt,
                     Execution exec = Execution::Parallel);

/// Integer (row, col) position of b's cell (0, 0) inside a. Throws
/// AlignmentError when gsd or lattice differ.
std::pair<std::int64_t, std::int64_t> lattice_offset(const LayeredGrid& a, const LayeredGrid& b);
bool lattice_aligned(const LayeredGrid& a, const LayeredGrid& b);

struct Overlap {
  std::optional<LayeredGrid> global_window;
  std::optional<LayeredGrid> update_window;
  /// Update with every cell already valid in the global grid blanked out.
  LayeredGrid disjoint_update;
};

Overlap extract_overlap(const LayeredGrid& global, const LayeredGrid& update);

/// Copies every non-no-data value of `region` into `global`, adding missing
/// layers. Throws DomainError if the region leaves the global extent.
void write_region(LayeredGrid& global, const LayeredGrid& region);

/// Cell-by-cell equality including no-data positions and geometry.
bool identical(const LayeredGrid& a, const LayeredGrid& b);

}  // namespace aeromap
