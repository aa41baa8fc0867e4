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

#include "aeromap/export.hpp"

#include "aeromap/errors.hpp"
#include "aeromap/grid_io.hpp"

namespace aeromap {

std::vector<std::filesystem::path> export_snapshot(const LayeredGrid& map, const std::filesystem::path& dir,
                                                   bool with_cloud) {
  namespace fs = std::filesystem;
  if (map.empty()) throw DomainError("nothing to export");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  write_color_raster(dir / "ortho.png", map);
  written.push_back(dir / "ortho.png");
  written.push_back(dir / "ortho.pgw");
  if (map.has_layer(layer::kElevation)) {
    write_ascii_grid(dir / "elevation.asc", map, layer::kElevation);
    written.push_back(dir / "elevation.asc");
  }
  if (map.has_layer(layer::kVariance)) {
    write_ascii_grid(dir / "elevation_variance.asc", map, layer::kVariance);
    written.push_back(dir / "elevation_variance.asc");
  }
  if (map.has_layer(layer::kObservations)) {
    write_layer_raster16(dir / "num_observations.png", map, layer::kObservations);
    written.push_back(dir / "num_observations.png");
    written.push_back(dir / "num_observations.pgw");
  }
  if (with_cloud) {
    write_ply(dir / "dense.ply", map);
    written.push_back(dir / "dense.ply");
  }
  return written;
}

}  // namespace aeromap
