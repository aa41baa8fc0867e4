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

#include <Eigen/Core>

#include "aeromap/geodesy.hpp"

namespace aeromap {

/// Pinhole intrinsics of a calibrated, undistorted camera. Pixel centers lie
/// on integer coordinates, so the image spans [-0.5, width - 0.5).
struct CameraModel {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  Eigen::Matrix3d K() const;
  void validate() const;
};

enum class PoseSource { Visual, GnssDefault };

/// Camera to world transform. The world frame is (easting, northing, altitude).
///
/// The body frame of the camera has x along the image columns, y towards the
/// top of the image and z pointing away from the scene, so an identity
/// rotation is a nadir camera with the image top facing north. Projection
/// converts to the usual optical frame (y down, z forward) internally.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  UtmCoord translation;
  PoseSource source = PoseSource::Visual;

  Eigen::Vector3d position() const { return translation.position(); }
  Eigen::Matrix<double, 3, 4> matrix() const;
};

/// True when `r` is orthonormal with determinant +1 within `tolerance`.
bool is_rotation(const Eigen::Matrix3d& r, double tolerance = 1e-9);

/// Nadir fallback pose from GNSS position and compass heading (degrees,
/// clockwise from north): a pure yaw of -heading about the vertical axis.
Pose default_pose(const UtmCoord& geotag, double heading_deg);

struct Projection {
  Eigen::Vector2d pixel;
  double depth = 0.0;
  bool in_view = false;  // pixel within [0, width-1] x [0, height-1]
};

/// World point to pixel. Throws BehindCameraError for non-positive depth.
Projection project(const CameraModel& camera, const Pose& pose, const Eigen::Vector3d& world);

/// Pixel plus depth along the optical axis to world point. Throws DomainError
/// for depth <= 0.
Eigen::Vector3d backproject(const CameraModel& camera, const Pose& pose, const Eigen::Vector2d& pixel,
                            double depth);

/// World-frame ray through `pixel`, scaled so that t = depth.
Eigen::Vector3d pixel_ray(const CameraModel& camera, const Pose& pose, const Eigen::Vector2d& pixel);

/// Rotation from the optical frame (x right, y down, z forward) to world.
Eigen::Matrix3d optical_to_world(const Pose& pose);

/// Bounding box of the image outline intersected with the plane z = plane_z.
RegionOfInterest ground_footprint(const CameraModel& camera, const Pose& pose, double plane_z);

}  // namespace aeromap
