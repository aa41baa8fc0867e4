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

#include <cstddef>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "aeromap/frame.hpp"
#include "aeromap/stage.hpp"

namespace aeromap::pose {

using LocalPose = Eigen::Matrix<double, 3, 4>;

struct TrackResult {
  enum class State { Tracking, Lost, Initializing };

  State state = State::Lost;
  LocalPose local_pose = LocalPose::Zero();    // camera to visual frame
  std::vector<Eigen::Vector3d> sparse_points;  // visual frame

  static TrackResult tracking(const LocalPose& pose, std::vector<Eigen::Vector3d> points = {}) {
    return {State::Tracking, pose, std::move(points)};
  }
  static TrackResult lost() { return {}; }
  static TrackResult initializing() { return {State::Initializing, LocalPose::Zero(), {}}; }
};

/// Visual odometry/SLAM front end. Poses live in an arbitrary-scale local
/// frame that is consistent across calls. Called from one worker only.
class PoseProvider {
 public:
  virtual ~PoseProvider() = default;
  virtual TrackResult track(const Frame& frame) = 0;
};

/// Never tracks; every frame goes down the GNSS fallback path.
class NullPoseProvider final : public PoseProvider {
 public:
  TrackResult track(const Frame&) override { return TrackResult::lost(); }
};

/// Similarity from the visual frame to UTM, restricted to yaw.
struct GeoreferenceTransform {
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& v) const { return scale * (rotation * v) + translation; }
  double yaw() const;
};

struct GeoreferenceEstimate {
  GeoreferenceTransform transform;
  double rmse = 0.0;
};

/// Least-squares scale, yaw and 3-D translation mapping `visual` onto `utm`.
/// Throws DegenerateGeometryError for fewer than three points or when the
/// horizontal positions are (numerically) collinear.
GeoreferenceEstimate estimate_georeference(std::span<const Eigen::Vector3d> visual,
                                           std::span<const Eigen::Vector3d> utm);

/// Maps a local pose into UTM; zone and hemisphere are taken from `zone_of`.
Pose apply_georeference(const GeoreferenceTransform& transform, const LocalPose& local_pose,
                        const UtmCoord& zone_of);

/// True iff the camera moved at least `min_translation` since the last
/// keyframe (always true without one).
bool select_keyframe(const Pose& pose, const std::optional<Eigen::Vector3d>& last_keyframe, double min_translation);

struct PoseStageConfig {
  std::size_t min_reference_frames = 20;
  double max_reference_rmse = 1.0;
  /// Fixed keyframe distance in meters; when unset it is derived from the
  /// first frame as `keyframe_footprint_fraction` of the footprint width.
  std::optional<double> keyframe_min_translation;
  double keyframe_footprint_fraction = 0.2;
  bool fallback_enabled = true;
};

class PoseStage final : public Stage {
 public:
  PoseStage(std::unique_ptr<PoseProvider> provider, PoseStageConfig config);

  std::string name() const override { return "pose"; }
  void process(Frame frame, const Emit& emit) override;
  void flush(const Emit& emit) override;

  const std::optional<GeoreferenceEstimate>& georeference() const { return georeference_; }
  std::size_t queued() const { return queue_.size(); }

 private:
  struct Queued {
    Frame frame;
    std::optional<LocalPose> local_pose;  // unset for frames held while not tracking
    std::vector<Eigen::Vector3d> sparse_points;
  };

  void try_georeference();
  void drain(const Emit& emit);
  void finish_visual(Frame& frame, const LocalPose& local_pose, const std::vector<Eigen::Vector3d>& sparse) const;
  bool fallback(Frame& frame) const;
  void release(Frame frame, const Emit& emit);

  std::unique_ptr<PoseProvider> provider_;
  PoseStageConfig config_;
  std::optional<int> zone_;
  std::deque<Queued> queue_;
  std::vector<Eigen::Vector3d> reference_visual_;
  std::vector<Eigen::Vector3d> reference_utm_;
  std::optional<GeoreferenceEstimate> georeference_;
  std::optional<Eigen::Vector3d> last_keyframe_;
  std::optional<double> keyframe_distance_;
};

}  // namespace aeromap::pose
