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

#include "aeromap/exec.hpp"
#include "aeromap/frame.hpp"
#include "aeromap/stage.hpp"
#include "aeromap/terrain.hpp"

namespace aeromap::densify {

/// Per-pixel depth along the optical axis; NaN marks missing depth.
struct DepthMap {
  int width = 0;
  int height = 0;
  std::vector<double> depths;

  DepthMap() = default;
  DepthMap(int w, int h);

  double at(int u, int v) const { return depths[std::size_t(v) * width + u]; }
  double& at(int u, int v) { return depths[std::size_t(v) * width + u]; }
  std::size_t count_valid() const;
};

class Densifier {
 public:
  virtual ~Densifier() = default;
  virtual std::size_t required_frame_count() const = 0;
  /// Depth for window[reference]; nullopt when the window cannot be matched.
  virtual std::optional<DepthMap> densify(std::span<const Frame* const> window, std::size_t reference) = 0;
};

/// Lifts every valid depth on the stride lattice (u, v multiples of stride)
/// to a world point colored by its source pixel.
PointCloud depth_to_cloud(const Frame& frame, const DepthMap& depth, int stride);

/// Exact depth by casting each pixel ray against a known terrain.
class GroundTruthDensifier final : public Densifier {
 public:
  explicit GroundTruthDensifier(std::shared_ptr<const Terrain> terrain, Execution exec = Execution::Parallel)
      : terrain_(std::move(terrain)), exec_(exec) {}

  std::size_t required_frame_count() const override { return 1; }
  std::optional<DepthMap> densify(std::span<const Frame* const> window, std::size_t reference) override;

 private:
  std::shared_ptr<const Terrain> terrain_;
  Execution exec_;
};

struct BlockMatchConfig {
  std::size_t frames = 3;
  int planes = 64;
  int half_window = 2;          // 5x5 patches
  int step = 2;                 // only pixels on this lattice get a depth
  double min_depth_ratio = 0.6; // depth search range relative to the camera height above z = 0
  double max_depth_ratio = 1.4;
  double max_cost = 12.0;       // mean absolute gray difference per patch pixel
};

/// Plane sweep over fronto-parallel planes of the reference camera, sampled
/// uniformly in inverse depth, scored by summed absolute differences.
class BlockMatchDensifier final : public Densifier {
 public:
  explicit BlockMatchDensifier(BlockMatchConfig config = {}, Execution exec = Execution::Parallel);

  std::size_t required_frame_count() const override { return config_.frames; }
  std::optional<DepthMap> densify(std::span<const Frame* const> window, std::size_t reference) override;

 private:
  BlockMatchConfig config_;
  Execution exec_;
};

struct DensifyConfig {
  int stride = 2;
};

class DensifyStage final : public Stage {
 public:
  /// A null densifier publishes every frame with its sparse cloud only.
  DensifyStage(std::unique_ptr<Densifier> densifier, DensifyConfig config = {});

  std::string name() const override { return "densify"; }
  void process(Frame frame, const Emit& emit) override;
  void flush(const Emit& emit) override;

 private:
  void publish_pending(std::size_t until, const Emit& emit);

  std::unique_ptr<Densifier> densifier_;
  DensifyConfig config_;
  std::deque<Frame> window_;
  std::size_t published_ = 0;  // leading window frames already handed on
};

}  // namespace aeromap::densify
