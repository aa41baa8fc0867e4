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

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aeromap/densify.hpp"
#include "aeromap/ingest.hpp"
#include "aeromap/mosaic.hpp"
#include "aeromap/pose_stage.hpp"
#include "aeromap/rectify.hpp"
#include "aeromap/stage.hpp"
#include "aeromap/stats.hpp"
#include "aeromap/surface.hpp"

namespace aeromap {

struct EngineOptions {
  std::size_t queue_capacity = 4;
  double replay_rate = 0.0;  // frames per second fed from the source; 0 = as fast as accepted
  double stats_window = 10.0;
  /// Minimum wall time per processed frame, by stage name (throttling).
  std::map<std::string, double> min_stage_seconds;
};

struct StageReport {
  std::string name;
  std::size_t frames_in = 0;
  std::size_t frames_out = 0;
  std::vector<RateSample> history;
};

struct EngineResult {
  std::size_t frames_ingested = 0;
  bool aborted = false;
  std::string error;
  double seconds = 0.0;
  std::vector<StageReport> stages;
};

/// Runs stages on one worker each, connected by bounded queues. A stage
/// receives a frame when it is pushed into its input queue (f_in) and emits
/// when it hands a frame on (f_out).
class Pipeline {
 public:
  Pipeline(std::vector<std::unique_ptr<Stage>> stages, EngineOptions options = {},
           Diagnostics* diagnostics = nullptr);

  /// Streams the source through all stages; `sink` receives the output of
  /// the last stage. An exception escaping a stage aborts the run.
  EngineResult run(FrameSource& source, const Stage::Emit& sink = {});

  /// Stops ingestion; frames already in flight are still processed.
  void request_stop() { stop_ = true; }

  std::size_t size() const { return stages_.size(); }
  Stage& stage(std::size_t i) { return *stages_.at(i); }
  template <typename T>
  T* find_stage() {
    for (auto& s : stages_)
      if (auto* p = dynamic_cast<T*>(s.get())) return p;
    return nullptr;
  }

 private:
  std::vector<std::unique_ptr<Stage>> stages_;
  EngineOptions options_;
  Diagnostics* diagnostics_;
  std::atomic<bool> stop_{false};
};

enum class Mode { GnssOnly, VisualStitch, Elevation };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

/// Stage chain for a mode: GnssOnly ignores the provider and builds planar
/// surfaces, VisualStitch uses the provider with planar surfaces, Elevation
/// adds densification and elevated surfaces.
struct StageSetup {
  Mode mode = Mode::GnssOnly;
  std::unique_ptr<pose::PoseProvider> provider;
  std::unique_ptr<densify::Densifier> densifier;
  pose::PoseStageConfig pose;
  densify::DensifyConfig densify;
  surface::SurfaceConfig surface;
  rectify::RectifyConfig rectify;
  mosaic::MosaicConfig mosaic;
  mosaic::MosaicStage::SnapshotSink snapshot_sink;
};

std::vector<std::unique_ptr<Stage>> build_stages(StageSetup setup);

struct PipelineConfig {
  Mode mode = Mode::GnssOnly;
  std::filesystem::path input;
  std::filesystem::path output;
  std::optional<double> gsd;
  double variance_threshold = 1.0;
  std::size_t snapshot_every = 0;
  std::string pose_provider = "none";   // synthetic | none
  std::string densifier = "none";       // groundtruth | blockmatch | none
  int depth_stride = 2;
  std::optional<double> keyframe_distance;
  bool fallback = true;
  EngineOptions engine;
};

struct RunReport {
  PipelineConfig config;
  EngineResult engine;
  std::size_t frames_skipped = 0;
  std::size_t frames_fused = 0;
  std::vector<Diagnostics::Entry> diagnostics;
  std::vector<std::string> outputs;
};

/// Ingests `config.input`, runs the pipeline and writes the final products
/// and report.json to `config.output`. Throws ConfigError for unusable
/// configurations; a stage failure is reported as aborted with the partial
/// map still exported.
RunReport run_pipeline(const PipelineConfig& config);

nlohmann::json report_to_json(const RunReport& report);

}  // namespace aeromap
