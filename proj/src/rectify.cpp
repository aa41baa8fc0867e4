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

#include "aeromap/rectify.hpp"

#include <algorithm>
#include <cmath>

#include "aeromap/errors.hpp"

namespace aeromap::rectify {
namespace {

constexpr double kRadToDeg = 180.0 / M_PI;

LayeredGrid prepare(const Frame& frame, double target_gsd, const std::optional<Eigen::Vector2d>& anchor,
                    Execution exec) {
  if (!frame.pose) throw DomainError("frame has no pose");
  if (!frame.surface) throw DomainError("frame has no surface");
  if (!(target_gsd > 0.0)) throw DomainError("target gsd must be positive");
  LayeredGrid grid = resample(*frame.surface, target_gsd, default_interpolation, anchor, exec);
  grid.add_layer(layer::kElevation);
  grid.add_layer(layer::kValid, 0.0);
  for (auto name : {layer::kColorR, layer::kColorG, layer::kColorB, layer::kAngle})
    grid.add_layer(name);
  return grid;
}

struct Layers {
  LayeredGrid::Raster& elevation;
  LayeredGrid::Raster& valid;
  LayeredGrid::Raster& r;
  LayeredGrid::Raster& g;
  LayeredGrid::Raster& b;
  LayeredGrid::Raster& angle;

  explicit Layers(LayeredGrid& grid)
      : elevation(grid.layer(layer::kElevation)),
        valid(grid.layer(layer::kValid)),
        r(grid.layer(layer::kColorR)),
        g(grid.layer(layer::kColorG)),
        b(grid.layer(layer::kColorB)),
        angle(grid.layer(layer::kAngle)) {}

  void invalidate(int i, int j) {
    valid(i, j) = 0.0;
    r(i, j) = g(i, j) = b(i, j) = angle(i, j) = LayeredGrid::no_data();
  }
  void set(int i, int j, const Eigen::Vector3d& color, double obs_angle) {
    valid(i, j) = 1.0;
    r(i, j) = color.x();
    g(i, j) = color.y();
    b(i, j) = color.z();
    angle(i, j) = obs_angle;
  }
};

}  // namespace

double observation_angle(const Pose& pose, const Eigen::Vector3d& point) {
  const Eigen::Vector3d d = pose.position() - point;
  return std::atan2(d.head<2>().norm(), d.z()) * kRadToDeg;
}

double default_target_gsd(const Frame& frame) {
  if (!frame.footprint || frame.camera.width <= 0) throw DomainError("frame has no footprint");
  const double native = frame.footprint->width() / frame.camera.width;
  return std::max(native, frame.surface_gsd / 4.0);
}

LayeredGrid rectify(const Frame& frame, double target_gsd, std::optional<Eigen::Vector2d> lattice_anchor,
                    Execution exec) {
  LayeredGrid grid = prepare(frame, target_gsd, lattice_anchor, exec);
  Layers out(grid);
  const CameraModel& cam = frame.camera;
  const Eigen::Matrix3d P = cam.K() * optical_to_world(*frame.pose).transpose();
  const Eigen::Vector3d C = frame.pose->position();
  const bool has_image = frame.image.width() == cam.width && frame.image.height() == cam.height;
  const double umax = cam.width - 1.0;
  const double vmax = cam.height - 1.0;

  const int rows = grid.rows();
  const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      const double h = out.elevation(i, j);
      if (out.valid(i, j) != 1.0 || std::isnan(h) || !has_image) {
        out.invalidate(i, j);
        continue;
      }
      const Eigen::Vector2d xy = grid.cell_center(i, j);
      const Eigen::Vector3d X(xy.x(), xy.y(), h);
      const Eigen::Vector3d q = P * (X - C);
      if (!(q.z() > 0.0)) {
        out.invalidate(i, j);
        continue;
      }
      const double u = q.x() / q.z();
      const double v = q.y() / q.z();
      if (!(u >= 0.0 && u <= umax && v >= 0.0 && v <= vmax)) {
        out.invalidate(i, j);
        continue;
      }
      out.set(i, j, frame.image.sample_bilinear(u, v), observation_angle(*frame.pose, X));
    }
  }
  return grid;
}

LayeredGrid rectify_reference(const Frame& frame, double target_gsd, std::optional<Eigen::Vector2d> lattice_anchor) {
  LayeredGrid grid = prepare(frame, target_gsd, lattice_anchor, Execution::Serial);
  Layers out(grid);
  const bool has_image = frame.image.width() == frame.camera.width && frame.image.height() == frame.camera.height;
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      const double h = out.elevation(i, j);
      if (out.valid(i, j) != 1.0 || std::isnan(h) || !has_image) {
        out.invalidate(i, j);
        continue;
      }
      const Eigen::Vector2d xy = grid.cell_center(i, j);
      const Eigen::Vector3d X(xy.x(), xy.y(), h);
      try {
        const Projection p = project(frame.camera, *frame.pose, X);
        if (!p.in_view) {
          out.invalidate(i, j);
          continue;
        }
        out.set(i, j, frame.image.sample_bilinear(p.pixel.x(), p.pixel.y()), observation_angle(*frame.pose, X));
      } catch (const BehindCameraError&) {
        out.invalidate(i, j);
      }
    }
  }
  return grid;
}

void RectifyStage::process(Frame frame, const Emit& emit) {
  const auto id = std::int64_t(frame.id);
  if (!frame.pose || !frame.surface) {
    report(id, "frame without pose or surface dropped");
    return;
  }
  try {
    if (!config_.target_gsd) config_.target_gsd = default_target_gsd(frame);
    if (!config_.lattice_anchor) {
      const double g = *config_.target_gsd;
      const Eigen::Vector2d o = frame.surface->origin();
      config_.lattice_anchor = Eigen::Vector2d(std::floor(o.x() / g) * g, std::floor(o.y() / g) * g);
    }
    frame.surface = rectify(frame, *config_.target_gsd, config_.lattice_anchor, config_.exec);
  } catch (const DomainError& e) {
    report(id, std::string("rectification failed: ") + e.what());
    return;
  }
  emit(std::move(frame));
}

}  // namespace aeromap::rectify
