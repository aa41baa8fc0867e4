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

#include "aeromap/pose_stage.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "aeromap/errors.hpp"

namespace aeromap::pose {

double GeoreferenceTransform::yaw() const { return std::atan2(rotation(1, 0), rotation(0, 0)); }

GeoreferenceEstimate estimate_georeference(std::span<const Eigen::Vector3d> visual,
                                           std::span<const Eigen::Vector3d> utm) {
  if (visual.size() != utm.size()) throw DomainError("georeference inputs differ in length");
  const std::size_t n = visual.size();
  if (n < 3) throw DegenerateGeometryError("georeference needs at least three positions");

  Eigen::Vector3d mv = Eigen::Vector3d::Zero();
  Eigen::Vector3d mu = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mv += visual[i];
    mu += utm[i];
  }
  mv /= double(n);
  mu /= double(n);

  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  double cross = 0.0;
  double dot = 0.0;
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector3d v = visual[i] - mv;
    const Eigen::Vector3d u = utm[i] - mu;
    cov += v.head<2>() * v.head<2>().transpose();
    cross += v.x() * u.y() - v.y() * u.x();
    dot += v.x() * u.x() + v.y() * u.y();
    spread += v.squaredNorm();
  }
  const Eigen::Vector2d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(cov).eigenvalues();
  if (!(spread > 0.0) || !(eig(1) > 0.0) || eig(0) < 1e-10 * eig(1))
    throw DegenerateGeometryError("visual positions are collinear in the horizontal plane");

  const double theta = std::atan2(cross, dot);
  GeoreferenceEstimate est;
  est.transform.rotation = Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitZ()).toRotationMatrix();
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    num += (utm[i] - mu).dot(est.transform.rotation * (visual[i] - mv));
  est.transform.scale = num / spread;
  if (!(est.transform.scale > 0.0)) throw DegenerateGeometryError("georeference scale is not positive");
  est.transform.translation = mu - est.transform.scale * (est.transform.rotation * mv);

  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) sq += (est.transform.apply(visual[i]) - utm[i]).squaredNorm();
  est.rmse = std::sqrt(sq / double(n));
  return est;
}

Pose apply_georeference(const GeoreferenceTransform& transform, const LocalPose& local_pose,
                        const UtmCoord& zone_of) {
  Pose pose;
  pose.rotation = transform.rotation * local_pose.leftCols<3>();
  if (!is_rotation(pose.rotation)) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(pose.rotation, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d r = svd.matrixU() * svd.matrixV().transpose();
    if (r.determinant() < 0.0) {
      Eigen::Matrix3d u = svd.matrixU();
      u.col(2) *= -1.0;
      r = u * svd.matrixV().transpose();
    }
    pose.rotation = r;
  }
  const Eigen::Vector3d t = transform.apply(local_pose.col(3));
  pose.translation = zone_of;
  pose.translation.easting = t.x();
  pose.translation.northing = t.y();
  pose.translation.altitude = t.z();
  pose.source = PoseSource::Visual;
  return pose;
}

bool select_keyframe(const Pose& pose, const std::optional<Eigen::Vector3d>& last_keyframe, double min_translation) {
  if (!last_keyframe) return true;
  return (pose.position() - *last_keyframe).norm() >= min_translation;
}

PoseStage::PoseStage(std::unique_ptr<PoseProvider> provider, PoseStageConfig config)
    : provider_(std::move(provider)), config_(config) {
  if (!provider_) throw ConfigError("pose stage needs a provider");
  if (config_.min_reference_frames < 3) throw ConfigError("min_reference_frames must be at least 3");
  if (!(config_.max_reference_rmse > 0.0)) throw ConfigError("max_reference_rmse must be positive");
  if (config_.keyframe_min_translation && !(*config_.keyframe_min_translation >= 0.0))
    throw ConfigError("keyframe distance must be non-negative");
}

void PoseStage::process(Frame frame, const Emit& emit) {
  try {
    frame.utm = wgs84_to_utm(frame.geotag, zone_);
  } catch (const DomainError& e) {
    report(std::int64_t(frame.id), e.what());
    return;
  }
  if (!zone_) zone_ = frame.utm->zone;
  if (!keyframe_distance_) {
    if (config_.keyframe_min_translation) {
      keyframe_distance_ = *config_.keyframe_min_translation;
    } else {
      const double footprint_width = std::max(0.0, frame.utm->altitude) * frame.camera.width / frame.camera.fx;
      keyframe_distance_ = config_.keyframe_footprint_fraction * footprint_width;
    }
  }

  TrackResult track = provider_->track(frame);
  switch (track.state) {
    case TrackResult::State::Tracking:
      if (georeference_) {
        finish_visual(frame, track.local_pose, track.sparse_points);
        release(std::move(frame), emit);
        return;
      }
      reference_visual_.push_back(track.local_pose.col(3));
      reference_utm_.push_back(frame.utm->position());
      queue_.push_back({std::move(frame), track.local_pose, std::move(track.sparse_points)});
      try_georeference();
      if (georeference_) drain(emit);
      return;
    case TrackResult::State::Initializing:
      queue_.push_back({std::move(frame), std::nullopt, {}});
      return;
    case TrackResult::State::Lost:
      if (!queue_.empty()) {
        queue_.push_back({std::move(frame), std::nullopt, {}});
        return;
      }
      if (fallback(frame)) release(std::move(frame), emit);
      return;
  }
}

void PoseStage::flush(const Emit& emit) { drain(emit); }

void PoseStage::try_georeference() {
  if (georeference_ || reference_visual_.size() < config_.min_reference_frames) return;
  try {
    auto est = estimate_georeference(reference_visual_, reference_utm_);
    if (est.rmse <= config_.max_reference_rmse) georeference_ = est;
  } catch (const DegenerateGeometryError&) {
    // keep queueing until the trajectory has some width
  }
}

void PoseStage::drain(const Emit& emit) {
  while (!queue_.empty()) {
    Queued q = std::move(queue_.front());
    queue_.pop_front();
    if (q.local_pose && georeference_) {
      finish_visual(q.frame, *q.local_pose, q.sparse_points);
      release(std::move(q.frame), emit);
    } else if (fallback(q.frame)) {
      release(std::move(q.frame), emit);
    }
  }
}

void PoseStage::finish_visual(Frame& frame, const LocalPose& local_pose,
                              const std::vector<Eigen::Vector3d>& sparse) const {
  frame.pose = apply_georeference(georeference_->transform, local_pose, *frame.utm);
  if (sparse.empty()) return;
  PointCloud cloud;
  cloud.reserve(sparse.size());
  for (const auto& v : sparse) {
    CloudPoint p;
    p.position = georeference_->transform.apply(v);
    if (!frame.image.empty()) {
      try {
        const Projection proj = project(frame.camera, *frame.pose, p.position);
        if (proj.in_view) {
          const Eigen::Vector3d c = frame.image.sample_bilinear(proj.pixel.x(), proj.pixel.y());
          p.color = {to_byte(c.x()), to_byte(c.y()), to_byte(c.z())};
        }
      } catch (const BehindCameraError&) {
      }
    }
    cloud.push_back(p);
  }
  frame.sparse_cloud = std::move(cloud);
}

bool PoseStage::fallback(Frame& frame) const {
  if (!config_.fallback_enabled) return false;
  if (!frame.stabilized) {
    report(std::int64_t(frame.id), "no visual pose and camera not stabilized; dropped");
    return false;
  }
  frame.pose = default_pose(*frame.utm, frame.heading);
  frame.sparse_cloud.reset();
  return true;
}

void PoseStage::release(Frame frame, const Emit& emit) {
  if (!select_keyframe(*frame.pose, last_keyframe_, keyframe_distance_.value_or(0.0))) return;
  last_keyframe_ = frame.pose->position();
  emit(std::move(frame));
}

}  // namespace aeromap::pose
