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

#include "aeromap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aeromap/errors.hpp"

namespace aeromap {
namespace {

constexpr double kSnap = 1e-9;
constexpr double kLatticeTolerance = 1e-6;

int cell_count(double extent, double gsd) {
  return std::max(1, static_cast<int>(std::ceil(extent / gsd - kSnap)));
}

void check_gsd(double gsd) {
  if (!std::isfinite(gsd) || !(gsd > 0.0)) throw DomainError("ground sampling distance must be positive");
}

LayeredGrid empty_like(const LayeredGrid& g, const Eigen::Vector2d& anchor, double gsd, std::int64_t row_offset,
                       std::int64_t col_offset, int rows, int cols) {
  LayeredGrid out(anchor, gsd, row_offset, col_offset, rows, cols);
  for (const auto& name : g.layer_names()) out.add_layer(name);
  return out;
}

}  // namespace

Interpolation default_interpolation(std::string_view name) {
  if (name == layer::kElevation || name == layer::kVariance || name == layer::kColorR || name == layer::kColorG ||
      name == layer::kColorB || name == layer::kAngle)
    return Interpolation::Bilinear;
  return Interpolation::Nearest;
}

LayeredGrid::LayeredGrid(const Eigen::Vector2d& anchor, double gsd, std::int64_t row_offset, std::int64_t col_offset,
                         int rows, int cols)
    : anchor_(anchor), gsd_(gsd), row_offset_(row_offset), col_offset_(col_offset), rows_(rows), cols_(cols) {
  check_gsd(gsd);
  if (rows < 0 || cols < 0) throw DomainError("negative grid size");
}

Eigen::Vector2d LayeredGrid::origin() const {
  return {anchor_.x() + static_cast<double>(col_offset_) * gsd_, anchor_.y() + static_cast<double>(row_offset_) * gsd_};
}

RegionOfInterest LayeredGrid::extent() const {
  return {anchor_.x() + static_cast<double>(col_offset_) * gsd_, anchor_.y() + static_cast<double>(row_offset_) * gsd_,
          anchor_.x() + static_cast<double>(col_offset_ + cols_) * gsd_,
          anchor_.y() + static_cast<double>(row_offset_ + rows_) * gsd_};
}

Eigen::Vector2d LayeredGrid::cell_center(int row, int col) const {
  return {anchor_.x() + (static_cast<double>(col_offset_ + col) + 0.5) * gsd_,
          anchor_.y() + (static_cast<double>(row_offset_ + row) + 0.5) * gsd_};
}

std::optional<CellIndex> LayeredGrid::cell_at(double easting, double northing) const {
  const double fc = std::floor((easting - anchor_.x()) / gsd_) - static_cast<double>(col_offset_);
  const double fr = std::floor((northing - anchor_.y()) / gsd_) - static_cast<double>(row_offset_);
  if (!(fc >= 0.0 && fc < cols_ && fr >= 0.0 && fr < rows_)) return std::nullopt;
  return CellIndex{static_cast<int>(fr), static_cast<int>(fc)};
}

bool LayeredGrid::has_layer(std::string_view name) const { return layers_.find(name) != layers_.end(); }

LayeredGrid::Raster& LayeredGrid::add_layer(std::string_view name, double fill) {
  auto it = layers_.find(name);
  if (it != layers_.end()) return it->second;
  return layers_.emplace(std::string(name), Raster::Constant(rows_, cols_, fill)).first->second;
}

void LayeredGrid::remove_layer(std::string_view name) {
  auto it = layers_.find(name);
  if (it != layers_.end()) layers_.erase(it);
}

LayeredGrid::Raster& LayeredGrid::layer(std::string_view name) {
  auto it = layers_.find(name);
  if (it == layers_.end()) throw std::out_of_range("grid has no layer '" + std::string(name) + "'");
  return it->second;
}

const LayeredGrid::Raster& LayeredGrid::layer(std::string_view name) const {
  auto it = layers_.find(name);
  if (it == layers_.end()) throw std::out_of_range("grid has no layer '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> LayeredGrid::layer_names() const {
  std::vector<std::string> names;
  names.reserve(layers_.size());
  for (const auto& [name, _] : layers_) names.push_back(name);
  return names;
}

bool LayeredGrid::valid(int row, int col) const {
  auto it = layers_.find(layer::kValid);
  return it != layers_.end() && it->second(row, col) == 1.0;
}

std::size_t LayeredGrid::count_valid() const {
  auto it = layers_.find(layer::kValid);
  if (it == layers_.end()) return 0;
  return static_cast<std::size_t>((it->second == 1.0).count());
}

LayeredGrid LayeredGrid::window(int row, int col, int rows, int cols) const {
  if (row < 0 || col < 0 || rows < 0 || cols < 0 || row + rows > rows_ || col + cols > cols_)
    throw std::out_of_range("grid window outside extent");
  LayeredGrid out(anchor_, gsd_, row_offset_ + row, col_offset_ + col, rows, cols);
  for (const auto& [name, raster] : layers_) out.layers_.emplace(name, raster.block(row, col, rows, cols));
  return out;
}

LayeredGrid create(const RegionOfInterest& roi, double gsd, const std::vector<std::string>& layer_names) {
  roi.validate();
  check_gsd(gsd);
  LayeredGrid grid({roi.min_easting, roi.min_northing}, gsd, 0, 0, cell_count(roi.height(), gsd),
                   cell_count(roi.width(), gsd));
  for (const auto& name : layer_names) grid.add_layer(name);
  return grid;
}

LayeredGrid create_aligned(const RegionOfInterest& roi, double gsd, const std::vector<std::string>& layer_names,
                           const Eigen::Vector2d& lattice_anchor) {
  roi.validate();
  check_gsd(gsd);
  const auto lo = [&](double v, double a) { return static_cast<std::int64_t>(std::floor((v - a) / gsd + kSnap)); };
  const auto hi = [&](double v, double a) { return static_cast<std::int64_t>(std::ceil((v - a) / gsd - kSnap)); };
  const std::int64_t c0 = lo(roi.min_easting, lattice_anchor.x());
  const std::int64_t r0 = lo(roi.min_northing, lattice_anchor.y());
  const std::int64_t c1 = std::max(c0 + 1, hi(roi.max_easting, lattice_anchor.x()));
  const std::int64_t r1 = std::max(r0 + 1, hi(roi.max_northing, lattice_anchor.y()));
  LayeredGrid grid(lattice_anchor, gsd, r0, c0, static_cast<int>(r1 - r0), static_cast<int>(c1 - c0));
  for (const auto& name : layer_names) grid.add_layer(name);
  return grid;
}

LayeredGrid grow(const LayeredGrid& grid, const RegionOfInterest& roi, int chunk) {
  if (chunk < 1) chunk = 1;
  const double gsd = grid.gsd();
  const Eigen::Vector2d& a = grid.anchor();
  std::int64_t c0 = grid.col_offset(), r0 = grid.row_offset();
  std::int64_t c1 = c0 + grid.cols(), r1 = r0 + grid.rows();

  const auto lo = [&](double v, double anchor) {
    return static_cast<std::int64_t>(std::floor((v - anchor) / gsd + kSnap));
  };
  const auto hi = [&](double v, double anchor) {
    return static_cast<std::int64_t>(std::ceil((v - anchor) / gsd - kSnap));
  };
  const auto extend_down = [&](std::int64_t current, std::int64_t wanted) {
    if (wanted >= current) return current;
    const std::int64_t by = current - wanted;
    return current - (by + chunk - 1) / chunk * chunk;
  };
  const auto extend_up = [&](std::int64_t current, std::int64_t wanted) {
    if (wanted <= current) return current;
    const std::int64_t by = wanted - current;
    return current + (by + chunk - 1) / chunk * chunk;
  };
  const std::int64_t nc0 = extend_down(c0, lo(roi.min_easting, a.x()));
  const std::int64_t nr0 = extend_down(r0, lo(roi.min_northing, a.y()));
  const std::int64_t nc1 = extend_up(c1, hi(roi.max_easting, a.x()));
  const std::int64_t nr1 = extend_up(r1, hi(roi.max_northing, a.y()));
  if (nc0 == c0 && nr0 == r0 && nc1 == c1 && nr1 == r1) return grid;

  LayeredGrid out = empty_like(grid, a, gsd, nr0, nc0, static_cast<int>(nr1 - nr0), static_cast<int>(nc1 - nc0));
  const int dr = static_cast<int>(r0 - nr0);
  const int dc = static_cast<int>(c0 - nc0);
  for (const auto& name : grid.layer_names())
    out.layer(name).block(dr, dc, grid.rows(), grid.cols()) = grid.layer(name);
  return out;
}

std::pair<std::int64_t, std::int64_t> lattice_offset(const LayeredGrid& a, const LayeredGrid& b) {
  if (std::abs(a.gsd() - b.gsd()) > 1e-12 * a.gsd()) throw AlignmentError("grids have different gsd");
  const Eigen::Vector2d k = (b.anchor() - a.anchor()) / a.gsd();
  const double kr = std::round(k.y());
  const double kc = std::round(k.x());
  if (std::abs(k.y() - kr) > kLatticeTolerance || std::abs(k.x() - kc) > kLatticeTolerance)
    throw AlignmentError("grids are not on the same lattice");
  return {static_cast<std::int64_t>(kr) + b.row_offset() - a.row_offset(),
          static_cast<std::int64_t>(kc) + b.col_offset() - a.col_offset()};
}

bool lattice_aligned(const LayeredGrid& a, const LayeredGrid& b) {
  try {
    lattice_offset(a, b);
    return true;
  } catch (const AlignmentError&) {
    return false;
  }
}

LayeredGrid resample(const LayeredGrid& grid, double new_gsd, InterpolationPolicy policy,
                     std::optional<Eigen::Vector2d> lattice_anchor, Execution exec) {
  check_gsd(new_gsd);
  const RegionOfInterest ext = grid.extent();
  LayeredGrid out;
  if (lattice_anchor) {
    out = create_aligned(ext, new_gsd, grid.layer_names(), *lattice_anchor);
  } else {
    out = LayeredGrid(grid.origin(), new_gsd, 0, 0, cell_count(ext.height(), new_gsd),
                      cell_count(ext.width(), new_gsd));
    for (const auto& name : grid.layer_names()) out.add_layer(name);
  }

  // Same lattice: plain copy, no interpolation round-off.
  if (lattice_aligned(grid, out)) {
    const auto [dr, dc] = lattice_offset(out, grid);
    for (const auto& name : grid.layer_names()) {
      const auto& src = grid.layer(name);
      auto& dst = out.layer(name);
      for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c) {
          const std::int64_t sr = r - dr, sc = c - dc;
          if (sr >= 0 && sr < grid.rows() && sc >= 0 && sc < grid.cols()) dst(r, c) = src(sr, sc);
        }
    }
    return out;
  }

  const Eigen::Vector2d src_origin = grid.origin();
  const double gsd = grid.gsd();
  const int src_rows = grid.rows();
  const int src_cols = grid.cols();
  struct LayerPair {
    const LayeredGrid::Raster* src;
    LayeredGrid::Raster* dst;
    Interpolation mode;
  };
  std::vector<LayerPair> pairs;
  for (const auto& name : grid.layer_names())
    pairs.push_back({&grid.layer(name), &out.layer(name), policy(name)});

  const int rows = out.rows();
  const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      const Eigen::Vector2d p = out.cell_center(r, c);
      const double x = (p.x() - src_origin.x()) / gsd;
      const double y = (p.y() - src_origin.y()) / gsd;
      if (!(x >= 0.0 && x < src_cols && y >= 0.0 && y < src_rows)) continue;
      const int nc = std::min(static_cast<int>(x), src_cols - 1);
      const int nr = std::min(static_cast<int>(y), src_rows - 1);
      const double fx = x - 0.5;
      const double fy = y - 0.5;
      const int c0 = static_cast<int>(std::floor(fx));
      const int r0 = static_cast<int>(std::floor(fy));
      const double tx = fx - c0;
      const double ty = fy - r0;
      const int cs[2] = {std::clamp(c0, 0, src_cols - 1), std::clamp(c0 + 1, 0, src_cols - 1)};
      const int rs[2] = {std::clamp(r0, 0, src_rows - 1), std::clamp(r0 + 1, 0, src_rows - 1)};
      const double wx[2] = {1.0 - tx, tx};
      const double wy[2] = {1.0 - ty, ty};
      for (const auto& lp : pairs) {
        if (lp.mode == Interpolation::Nearest) {
          (*lp.dst)(r, c) = (*lp.src)(nr, nc);
          continue;
        }
        double sum = 0.0, weight = 0.0;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            const double w = wy[i] * wx[j];
            if (w <= 0.0) continue;
            const double v = (*lp.src)(rs[i], cs[j]);
            if (LayeredGrid::is_no_data(v)) continue;
            sum += w * v;
            weight += w;
          }
        if (weight > 0.0) (*lp.dst)(r, c) = sum / weight;
      }
    }
  }
  return out;
}

Overlap extract_overlap(const LayeredGrid& global, const LayeredGrid& update) {
  const auto [dr, dc] = lattice_offset(global, update);
  Overlap result{std::nullopt, std::nullopt, update};

  const std::int64_t r0 = std::max<std::int64_t>(0, dr);
  const std::int64_t c0 = std::max<std::int64_t>(0, dc);
  const std::int64_t r1 = std::min<std::int64_t>(global.rows(), dr + update.rows());
  const std::int64_t c1 = std::min<std::int64_t>(global.cols(), dc + update.cols());
  if (r1 <= r0 || c1 <= c0) return result;

  const int rows = static_cast<int>(r1 - r0);
  const int cols = static_cast<int>(c1 - c0);
  result.global_window = global.window(static_cast<int>(r0), static_cast<int>(c0), rows, cols);
  result.update_window = update.window(static_cast<int>(r0 - dr), static_cast<int>(c0 - dc), rows, cols);

  if (!global.has_layer(layer::kValid)) return result;
  const auto& gvalid = global.layer(layer::kValid);
  auto names = result.disjoint_update.layer_names();
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (gvalid(r0 + r, c0 + c) != 1.0) continue;
      const int ur = static_cast<int>(r0 - dr) + r;
      const int uc = static_cast<int>(c0 - dc) + c;
      for (const auto& name : names) result.disjoint_update.layer(name)(ur, uc) = LayeredGrid::no_data();
    }
  return result;
}

void write_region(LayeredGrid& global, const LayeredGrid& region) {
  const auto [dr, dc] = lattice_offset(global, region);
  if (dr < 0 || dc < 0 || dr + region.rows() > global.rows() || dc + region.cols() > global.cols())
    throw DomainError("region lies outside the global grid");
  for (const auto& name : region.layer_names()) {
    const auto& src = region.layer(name);
    auto& dst = global.add_layer(name);
    for (int r = 0; r < region.rows(); ++r)
      for (int c = 0; c < region.cols(); ++c) {
        const double v = src(r, c);
        if (!LayeredGrid::is_no_data(v)) dst(dr + r, dc + c) = v;
      }
  }
}

bool identical(const LayeredGrid& a, const LayeredGrid& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.gsd() != b.gsd()) return false;
  if (a.origin() != b.origin()) return false;
  if (a.layer_names() != b.layer_names()) return false;
  for (const auto& name : a.layer_names()) {
    const auto& x = a.layer(name);
    const auto& y = b.layer(name);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double u = x.data()[i];
      const double v = y.data()[i];
      if (std::isnan(u) != std::isnan(v)) return false;
      if (!std::isnan(u) && u != v) return false;
    }
  }
  return true;
}

}  // namespace aeromap
