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

#include <span>

#include "aeromap/exec.hpp"
#include "aeromap/frame.hpp"
#include "aeromap/kdtree.hpp"
#include "aeromap/stage.hpp"

namespace aeromap::surface {

/// Zero elevation, everywhere valid, 1 m cells (at least one cell).
LayeredGrid build_planar_dsm(const RegionOfInterest& footprint);

/// Mean distance to the nearest other point over a deterministic sample of
/// max(1, ceil(fraction * N)) points: every floor(N / m)-th tree point.
/// Throws DomainError for fewer than two points, DegenerateGeometryError if
/// all sampled points are coincident with a neighbour.
double estimate_gsd(const KdTree2& tree, double sample_fraction = 0.01);

struct HeightSample {
  double z = 0.0;
  double distance = 0.0;
};

/// Inverse distance weighting with weights 1/d; a sample closer than 1e-12
/// is returned as is.
double interpolate_height(std::span<const HeightSample> neighbours);

struct ElevatedDsmConfig {
  double radius_factor = 2.0;   // search radius in cells
  std::size_t max_neighbours = 8;
  double sample_fraction = 0.01;
};

/// Grid at the estimated point spacing over `footprint`; cells with cloud
/// points within the search radius of their center get an IDW elevation.
LayeredGrid build_elevated_dsm(const RegionOfInterest& footprint, const PointCloud& cloud,
                               const ElevatedDsmConfig& config = {}, Execution exec = Execution::Parallel);

/// Image corners projected onto the plane z = plane_z, as a bounding box.
RegionOfInterest frame_footprint(const Frame& frame, double plane_z);

double median_elevation(const PointCloud& cloud);

struct SurfaceConfig {
  bool elevated = true;  // false: always planar
  ElevatedDsmConfig dsm;
  Execution exec = Execution::Parallel;
};

class SurfaceStage final : public Stage {
 public:
  explicit SurfaceStage(SurfaceConfig config = {}) : config_(config) {}

  std::string name() const override { return "surface"; }
  void process(Frame frame, const Emit& emit) override;

 private:
  SurfaceConfig config_;
};

}  // namespace aeromap::surface
