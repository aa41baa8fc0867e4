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

#include "aeromap/surface.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aeromap/errors.hpp"

namespace aeromap::surface {

LayeredGrid build_planar_dsm(const RegionOfInterest& footprint) {
  LayeredGrid grid = create(footprint, 1.0, {});
  grid.add_layer(layer::kElevation, 0.0);
  grid.add_layer(layer::kValid, 1.0);
  return grid;
}

double estimate_gsd(const KdTree2& tree, double sample_fraction) {
  const std::size_t n = tree.size();
  if (n < 2) throw DomainError("gsd estimation needs at least two points");
  if (!(sample_fraction > 0.0 && sample_fraction <= 1.0)) throw DomainError("sample fraction must be in (0, 1]");
  const std::size_t m = std::max<std::size_t>(1, std::size_t(std::ceil(sample_fraction * double(n))));
  const std::size_t step = std::max<std::size_t>(1, n / m);
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k * step;
    sum += tree.nearest(tree.point(i), i)->distance;
  }
  const double gsd = sum / double(m);
  if (!(gsd > 0.0)) throw DegenerateGeometryError("cloud points are coincident");
  return gsd;
}

double interpolate_height(std::span<const HeightSample> neighbours) {
  if (neighbours.empty()) throw DomainError("interpolation needs at least one neighbour");
  double wsum = 0.0;
  double zsum = 0.0;
  for (const auto& s : neighbours) {
    if (s.distance < 1e-12) return s.z;
    const double w = 1.0 / s.distance;
    wsum += w;
    zsum += w * s.z;
  }
  return zsum / wsum;
}

LayeredGrid build_elevated_dsm(const RegionOfInterest& footprint, const PointCloud& cloud,
                               const ElevatedDsmConfig& config, Execution exec) {
  footprint.validate();
  if (cloud.empty()) throw DomainError("elevated surface needs a non-empty cloud");
  std::vector<Eigen::Vector2d> xy;
  xy.reserve(cloud.size());
  for (const auto& p : cloud) xy.push_back(p.position.head<2>());
  const KdTree2 tree(std::move(xy));
  const double gsd = estimate_gsd(tree, config.sample_fraction);
  if (footprint.width() / gsd * (footprint.height() / gsd) > 1e8)
    throw DomainError("surface grid would be too large");

  LayeredGrid grid = create(footprint, gsd, {});
  auto& elevation = grid.add_layer(layer::kElevation);
  auto& valid = grid.add_layer(layer::kValid, 0.0);
  const double radius = config.radius_factor * gsd;
  const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
  for (int i = 0; i < grid.rows(); ++i) {
    std::vector<HeightSample> samples;
    for (int j = 0; j < grid.cols(); ++j) {
      const auto found = tree.radius_search(grid.cell_center(i, j), radius, config.max_neighbours);
      if (found.empty()) continue;
      samples.clear();
      for (const auto& nb : found) samples.push_back({cloud[nb.index].position.z(), nb.distance});
      elevation(i, j) = interpolate_height(samples);
      valid(i, j) = 1.0;
    }
  }
  return grid;
}

RegionOfInterest frame_footprint(const Frame& frame, double plane_z) {
  if (!frame.pose) throw DomainError("frame has no pose");
  return ground_footprint(frame.camera, *frame.pose, plane_z);
}

double median_elevation(const PointCloud& cloud) {
  if (cloud.empty()) throw DomainError("median of an empty cloud");
  std::vector<double> z;
  z.reserve(cloud.size());
  for (const auto& p : cloud) z.push_back(p.position.z());
  const std::size_t mid = z.size() / 2;
  std::nth_element(z.begin(), z.begin() + mid, z.end());
  if (z.size() % 2 == 1) return z[mid];
  const double upper = z[mid];
  return 0.5 * (upper + *std::max_element(z.begin(), z.begin() + mid));
}

void SurfaceStage::process(Frame frame, const Emit& emit) {
  const auto id = std::int64_t(frame.id);
  if (!frame.pose) {
    report(id, "frame without pose dropped");
    return;
  }
  const PointCloud* cloud = nullptr;
  if (config_.elevated) {
    if (frame.dense_cloud && !frame.dense_cloud->empty())
      cloud = &*frame.dense_cloud;
    else if (frame.sparse_cloud && frame.sparse_cloud->size() >= 2)
      cloud = &*frame.sparse_cloud;
  }
  try {
    if (cloud) {
      try {
        const RegionOfInterest roi = frame_footprint(frame, median_elevation(*cloud));
        frame.footprint = roi;
        frame.surface = build_elevated_dsm(roi, *cloud, config_.dsm, config_.exec);
      } catch (const DegenerateGeometryError& e) {
        report(id, std::string("elevated surface failed, using planar: ") + e.what());
        cloud = nullptr;
      }
    }
    if (!cloud) {
      const RegionOfInterest roi = frame_footprint(frame, 0.0);
      frame.footprint = roi;
      frame.surface = build_planar_dsm(roi);
    }
  } catch (const DomainError& e) {
    report(id, std::string("no surface: ") + e.what());
    return;
  }
  frame.surface_gsd = frame.surface->gsd();
  emit(std::move(frame));
}

}  // namespace aeromap::surface
