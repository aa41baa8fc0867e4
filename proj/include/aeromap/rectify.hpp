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

#include <optional>

#include <Eigen/Core>

#include "aeromap/exec.hpp"
#include "aeromap/frame.hpp"
#include "aeromap/stage.hpp"

namespace aeromap::rectify {

/// Angle in degrees between the ray from `point` to the camera and the
/// vertical; 0 when the camera is straight above.
double observation_angle(const Pose& pose, const Eigen::Vector3d& point);

/// Native pixel footprint (footprint width / image width), but never finer
/// than a quarter of the surface gsd.
double default_target_gsd(const Frame& frame);

/// Backward projection of the frame's surface. The surface is resampled to
/// `target_gsd` (on `lattice_anchor` when given); every valid cell center is
/// projected into the image and receives a bilinear color and observation
/// angle, cells outside the image or behind the camera become invalid.
LayeredGrid rectify(const Frame& frame, double target_gsd, std::optional<Eigen::Vector2d> lattice_anchor = {},
                    Execution exec = Execution::Parallel);

/// Cell-by-cell implementation on top of project(); kept to check the kernel.
LayeredGrid rectify_reference(const Frame& frame, double target_gsd,
                              std::optional<Eigen::Vector2d> lattice_anchor = {});

struct RectifyConfig {
  std::optional<double> target_gsd;
  std::optional<Eigen::Vector2d> lattice_anchor;
  Execution exec = Execution::Parallel;
};

/// Rectifies onto one run-wide lattice: gsd and anchor come from the config
/// or are fixed by the first frame.
class RectifyStage final : public Stage {
 public:
  explicit RectifyStage(RectifyConfig config = {}) : config_(config) {}

  std::string name() const override { return "rectify"; }
  void process(Frame frame, const Emit& emit) override;

 private:
  RectifyConfig config_;
};

}  // namespace aeromap::rectify
