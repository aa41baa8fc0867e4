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

#include "aeromap/camera.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "aeromap/errors.hpp"

namespace aeromap {
namespace {

// Body frame (y up, z backwards) to optical frame (y down, z forward).
const Eigen::Matrix3d& body_to_optical() {
  static const Eigen::Matrix3d flip = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  return flip;
}

}  // namespace

Eigen::Matrix3d CameraModel::K() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

void CameraModel::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw DomainError("camera focal length must be positive");
  if (width <= 0 || height <= 0) throw DomainError("camera image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
    throw DomainError("camera principal point outside the image");
}

Eigen::Matrix<double, 3, 4> Pose::matrix() const {
  Eigen::Matrix<double, 3, 4> m;
  m.leftCols<3>() = rotation;
  m.col(3) = position();
  return m;
}

bool is_rotation(const Eigen::Matrix3d& r, double tolerance) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  return ortho <= tolerance && std::abs(r.determinant() - 1.0) <= tolerance;
}

Pose default_pose(const UtmCoord& geotag, double heading_deg) {
  double heading = std::fmod(heading_deg, 360.0);
  if (heading < 0.0) heading += 360.0;
  const double phi = -heading * M_PI / 180.0;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Pose pose;
  pose.rotation << c, -s, 0.0,
                   s, c, 0.0,
                   0.0, 0.0, 1.0;
  pose.translation = geotag;
  pose.source = PoseSource::GnssDefault;
  return pose;
}

Eigen::Matrix3d optical_to_world(const Pose& pose) { return pose.rotation * body_to_optical(); }

Projection project(const CameraModel& camera, const Pose& pose, const Eigen::Vector3d& world) {
  const Eigen::Vector3d optical = optical_to_world(pose).transpose() * (world - pose.position());
  if (!(optical.z() > 0.0)) throw BehindCameraError("point is behind the camera");
  Projection p;
  p.depth = optical.z();
  p.pixel = {camera.fx * optical.x() / optical.z() + camera.cx, camera.fy * optical.y() / optical.z() + camera.cy};
  p.in_view = p.pixel.x() >= 0.0 && p.pixel.x() <= camera.width - 1.0 && p.pixel.y() >= 0.0 &&
              p.pixel.y() <= camera.height - 1.0;
  return p;
}

Eigen::Vector3d pixel_ray(const CameraModel& camera, const Pose& pose, const Eigen::Vector2d& pixel) {
  const Eigen::Vector3d optical((pixel.x() - camera.cx) / camera.fx, (pixel.y() - camera.cy) / camera.fy, 1.0);
  return optical_to_world(pose) * optical;
}

Eigen::Vector3d backproject(const CameraModel& camera, const Pose& pose, const Eigen::Vector2d& pixel,
                            double depth) {
  if (!(depth > 0.0) || !std::isfinite(depth)) throw DomainError("depth must be positive");
  return pose.position() + depth * pixel_ray(camera, pose, pixel);
}

RegionOfInterest ground_footprint(const CameraModel& camera, const Pose& pose, double plane_z) {
  const double w = camera.width - 0.5;
  const double h = camera.height - 0.5;
  const Eigen::Vector2d corners[] = {{-0.5, -0.5}, {w, -0.5}, {w, h}, {-0.5, h}};
  const Eigen::Vector3d center = pose.position();
  RegionOfInterest roi{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& c : corners) {
    const Eigen::Vector3d ray = pixel_ray(camera, pose, c);
    const double t = (plane_z - center.z()) / ray.z();
    if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("image corner does not intersect the ground plane");
    const Eigen::Vector3d hit = center + t * ray;
    roi.min_easting = std::min(roi.min_easting, hit.x());
    roi.min_northing = std::min(roi.min_northing, hit.y());
    roi.max_easting = std::max(roi.max_easting, hit.x());
    roi.max_northing = std::max(roi.max_northing, hit.y());
  }
  return roi;
}

}  // namespace aeromap
