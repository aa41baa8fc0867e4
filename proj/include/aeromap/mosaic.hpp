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
#include <functional>
#include <limits>
#include <optional>

#include <Eigen/Core>

#include "aeromap/exec.hpp"
#include "aeromap/grid.hpp"
#include "aeromap/stage.hpp"

namespace aeromap::mosaic {

/// Running mean after adding x to n samples with mean `mean`.
double blend_mean(double mean, long n, double x);

/// Running sample variance (n - 1 denominator) after adding x to n samples
/// with mean `mean` and variance `variance` (0 for n = 1).
double blend_variance(double variance, long n, double mean, double x);

struct BlendConfig {
  double variance_threshold = 1.0;  // m^2
  bool angle_tiebreak = true;
  void validate() const;
};

struct Observation {
  double elevation = 0.0;
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  double angle = 0.0;
};

/// One elevation population seen at a cell, with the color of its most
/// orthogonal (or latest) observation.
struct Track {
  double mean = 0.0;
  double variance = 0.0;
  long n = 0;
  Eigen::Vector3d color = Eigen::Vector3d::Zero();
  double angle = 0.0;

  static Track start(const Observation& obs) { return {obs.elevation, 0.0, 1, obs.color, obs.angle}; }
  /// A single sample has no spread yet and never wins a comparison.
  double selection_variance() const { return n < 2 ? std::numeric_limits<double>::infinity() : variance; }
};

struct CellState {
  Track primary;
  std::optional<Track> hypothesis;
  long observations = 0;  // every observation fused into the cell
};

CellState initial_cell(const Observation& obs);

/// Blends `obs` into the track with the nearer mean. Within the variance
/// threshold the track absorbs it; otherwise resolve_hypothesis takes over.
CellState fuse_cell(CellState state, const Observation& obs, const BlendConfig& config);

/// Exceedance path: `obs` becomes a fresh hypothesis track, then the track
/// with the lower running variance is made primary (ties keep the primary).
CellState resolve_hypothesis(CellState state, const Observation& obs, const BlendConfig& config);

/// Swaps primary and hypothesis if the hypothesis has strictly lower variance.
void select_primary(CellState& state);

/// Fused elevation/color map on a fixed lattice.
class GlobalMap {
 public:
  explicit GlobalMap(BlendConfig config = {}, int growth_chunk = 32);

  /// Grows the map over the update and blends every valid update cell. The
  /// first update fixes gsd and lattice; later ones are resampled onto it.
  void fuse(const LayeredGrid& update, Execution exec = Execution::Parallel);

  bool empty() const { return grid_.empty(); }
  std::size_t fused() const { return fused_; }
  const LayeredGrid& grid() const { return grid_; }
  const BlendConfig& config() const { return config_; }
  std::optional<CellState> cell(int row, int col) const;
  std::optional<CellState> cell(CellIndex idx) const { return cell(idx.row, idx.col); }

 private:
  BlendConfig config_;
  int growth_chunk_;
  LayeredGrid grid_;
  std::size_t fused_ = 0;
};

struct MosaicConfig {
  BlendConfig blend;
  std::size_t snapshot_every = 0;  // 0 disables periodic snapshots
  int growth_chunk = 32;
  Execution exec = Execution::Parallel;
};

class MosaicStage final : public Stage {
 public:
  using SnapshotSink = std::function<void(const LayeredGrid& map, std::size_t fused)>;

  explicit MosaicStage(MosaicConfig config = {}, SnapshotSink sink = {});

  std::string name() const override { return "mosaic"; }
  void process(Frame frame, const Emit& emit) override;

  const GlobalMap& map() const { return map_; }

 private:
  MosaicConfig config_;
  SnapshotSink sink_;
  GlobalMap map_;
};

}  // namespace aeromap::mosaic
