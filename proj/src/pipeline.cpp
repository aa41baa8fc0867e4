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

#include "aeromap/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "aeromap/bounded_queue.hpp"
#include "aeromap/errors.hpp"
#include "aeromap/export.hpp"
#include "aeromap/synth.hpp"

namespace aeromap {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

Pipeline::Pipeline(std::vector<std::unique_ptr<Stage>> stages, EngineOptions options, Diagnostics* diagnostics)
    : stages_(std::move(stages)), options_(std::move(options)), diagnostics_(diagnostics) {
  if (stages_.empty()) throw ConfigError("pipeline needs at least one stage");
  for (auto& s : stages_) {
    if (!s) throw ConfigError("null stage");
    s->set_diagnostics(diagnostics_);
  }
}

EngineResult Pipeline::run(FrameSource& source, const Stage::Emit& sink) {
  const std::size_t n = stages_.size();
  const auto start = Clock::now();
  std::vector<std::unique_ptr<BoundedQueue<Frame>>> queues;
  std::vector<std::unique_ptr<StageStats>> stats;
  for (std::size_t k = 0; k < n; ++k) {
    queues.push_back(std::make_unique<BoundedQueue<Frame>>(options_.queue_capacity));
    stats.push_back(std::make_unique<StageStats>(stages_[k]->name(), options_.stats_window));
  }

  std::mutex error_mutex;
  std::string error;
  std::atomic<bool> aborted{false};
  auto abort_all = [&](const std::string& message) {
    {
      std::lock_guard lock(error_mutex);
      if (error.empty()) error = message;
    }
    aborted = true;
    stop_ = true;
    for (auto& q : queues) q->abort();
  };

  auto push_into = [&](std::size_t k, Frame&& frame) -> bool {
    if (k == n) {
      if (sink) sink(std::move(frame));
      return true;
    }
    // A full queue blocks the producer; receipt is stamped once the frame is in.
    const bool ok = queues[k]->push(std::move(frame));
    if (ok) stats[k]->record_message(Direction::In, seconds_since(start));
    return ok;
  };

  std::vector<std::thread> workers;
  for (std::size_t k = 0; k < n; ++k) {
    workers.emplace_back([&, k] {
      Stage& stage = *stages_[k];
      const auto throttle = options_.min_stage_seconds.find(stage.name());
      const Stage::Emit emit = [&](Frame&& out) {
        stats[k]->record_message(Direction::Out, seconds_since(start));
        push_into(k + 1, std::move(out));
      };
      try {
        while (auto frame = queues[k]->pop()) {
          const auto t0 = Clock::now();
          stage.process(std::move(*frame), emit);
          if (throttle != options_.min_stage_seconds.end())
            std::this_thread::sleep_until(t0 + std::chrono::duration_cast<Clock::duration>(
                                                   std::chrono::duration<double>(throttle->second)));
        }
        if (!aborted) stage.flush(emit);
      } catch (const std::exception& e) {
        abort_all(fmt::format("stage '{}' failed: {}", stage.name(), e.what()));
      }
      if (k + 1 < n) queues[k + 1]->close();
    });
  }

  EngineResult result;
  try {
    const auto feed_start = Clock::now();
    while (!stop_) {
      std::optional<Frame> frame = source.next();
      if (!frame) break;
      if (options_.replay_rate > 0.0)
        std::this_thread::sleep_until(feed_start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(
                                                       double(result.frames_ingested) / options_.replay_rate)));
      if (!push_into(0, std::move(*frame))) break;
      ++result.frames_ingested;
    }
  } catch (const std::exception& e) {
    abort_all(std::string("ingestion failed: ") + e.what());
  }
  queues[0]->close();
  for (auto& w : workers) w.join();

  result.aborted = aborted;
  result.error = error;
  result.seconds = seconds_since(start);
  for (std::size_t k = 0; k < n; ++k)
    result.stages.push_back({stages_[k]->name(), stats[k]->total(Direction::In), stats[k]->total(Direction::Out),
                             stats[k]->history()});
  return result;
}

Mode parse_mode(const std::string& name) {
  if (name == "gnss") return Mode::GnssOnly;
  if (name == "visual") return Mode::VisualStitch;
  if (name == "elevation") return Mode::Elevation;
  throw ConfigError("unknown mode '" + name + "'");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::GnssOnly:
      return "gnss";
    case Mode::VisualStitch:
      return "visual";
    case Mode::Elevation:
      return "elevation";
  }
  return "?";
}

std::vector<std::unique_ptr<Stage>> build_stages(StageSetup setup) {
  std::vector<std::unique_ptr<Stage>> stages;
  std::unique_ptr<pose::PoseProvider> provider = std::move(setup.provider);
  if (setup.mode == Mode::GnssOnly || !provider) provider = std::make_unique<pose::NullPoseProvider>();
  stages.push_back(std::make_unique<pose::PoseStage>(std::move(provider), setup.pose));
  if (setup.mode == Mode::Elevation)
    stages.push_back(std::make_unique<densify::DensifyStage>(std::move(setup.densifier), setup.densify));
  setup.surface.elevated = setup.mode == Mode::Elevation;
  stages.push_back(std::make_unique<surface::SurfaceStage>(setup.surface));
  stages.push_back(std::make_unique<rectify::RectifyStage>(setup.rectify));
  stages.push_back(std::make_unique<mosaic::MosaicStage>(setup.mosaic, std::move(setup.snapshot_sink)));
  return stages;
}

RunReport run_pipeline(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  RunReport report;
  report.config = config;
  if (config.input.empty() || config.output.empty()) throw ConfigError("input and output directories are required");
  if (config.gsd && !(*config.gsd > 0.0)) throw ConfigError("gsd must be positive");
  if (!(config.variance_threshold > 0.0)) throw ConfigError("variance threshold must be positive");
  if (config.engine.queue_capacity < 1) throw ConfigError("queue capacity must be positive");

  Diagnostics diagnostics;
  DirectorySource source(config.input, &diagnostics);

  StageSetup setup;
  setup.mode = config.mode;
  setup.pose.fallback_enabled = config.fallback;
  setup.pose.keyframe_min_translation = config.keyframe_distance;
  setup.densify.stride = config.depth_stride;
  setup.rectify.target_gsd = config.gsd;
  setup.mosaic.blend.variance_threshold = config.variance_threshold;
  setup.mosaic.snapshot_every = config.snapshot_every;

  const fs::path truth = config.input / "truth";
  std::optional<synth::SceneSpec> scene;
  auto need_scene = [&]() -> const synth::SceneSpec& {
    if (!scene) {
      if (!fs::exists(truth / "scene.json"))
        throw ConfigError("synthetic provider and ground-truth densifier need " + (truth / "scene.json").string());
      scene = synth::load_scene(truth / "scene.json");
    }
    return *scene;
  };

  if (config.mode != Mode::GnssOnly) {
    if (config.pose_provider == "synthetic") {
      const auto& s = need_scene();
      setup.provider = std::make_unique<synth::SyntheticPoseProvider>(synth::read_truth_poses(truth / "poses.txt"),
                                                                      s.provider, synth::make_terrain(s));
    } else if (config.pose_provider != "none") {
      throw ConfigError("unknown pose provider '" + config.pose_provider + "'");
    }
  }
  if (config.mode == Mode::Elevation) {
    if (config.densifier == "groundtruth")
      setup.densifier = std::make_unique<densify::GroundTruthDensifier>(synth::make_terrain(need_scene()));
    else if (config.densifier == "blockmatch")
      setup.densifier = std::make_unique<densify::BlockMatchDensifier>();
    else if (config.densifier != "none")
      throw ConfigError("unknown densifier '" + config.densifier + "'");
  }

  const bool with_cloud = config.mode == Mode::Elevation;
  if (config.snapshot_every > 0) {
    setup.snapshot_sink = [&, out = config.output](const LayeredGrid& map, std::size_t fused) {
      try {
        export_snapshot(map, out / "snapshots" / fmt::format("{:06d}", fused), false);
      } catch (const std::exception& e) {
        diagnostics.add("export", -1, fmt::format("snapshot after {} frames failed: {}", fused, e.what()));
      }
    };
  }

  Pipeline pipeline(build_stages(std::move(setup)), config.engine, &diagnostics);
  report.engine = pipeline.run(source);
  report.frames_skipped = source.skipped();

  const auto* mosaic = pipeline.find_stage<mosaic::MosaicStage>();
  report.frames_fused = mosaic ? mosaic->map().fused() : 0;
  if (mosaic && !mosaic->map().empty()) {
    try {
      for (const auto& p : export_snapshot(mosaic->map().grid(), config.output, with_cloud))
        report.outputs.push_back(p.string());
    } catch (const std::exception& e) {
      diagnostics.add("export", -1, std::string("final export failed: ") + e.what());
    }
  }
  report.diagnostics = diagnostics.entries();

  fs::create_directories(config.output);
  std::ofstream out(config.output / "report.json");
  if (!out) throw IoError("cannot write report to " + config.output.string());
  out << report_to_json(report).dump(2) << '\n';
  return report;
}

nlohmann::json report_to_json(const RunReport& report) {
  using nlohmann::json;
  auto number = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json stages = json::array();
  for (const auto& s : report.engine.stages) {
    json history = json::array();
    for (const auto& h : s.history)
      history.push_back({{"t", h.time}, {"f_in", h.f_in}, {"f_out", h.f_out}, {"delta_perf", number(h.delta_perf)}});
    stages.push_back({{"name", s.name}, {"frames_in", s.frames_in}, {"frames_out", s.frames_out}, {"history", history}});
  }
  json diags = json::array();
  for (const auto& d : report.diagnostics)
    diags.push_back({{"stage", d.stage}, {"frame", d.frame_id}, {"message", d.message}});
  const auto& c = report.config;
  return {
      {"config",
       {{"mode", mode_name(c.mode)}, {"input", c.input.string()}, {"output", c.output.string()},
        {"gsd", c.gsd ? json(*c.gsd) : json(nullptr)}, {"variance_threshold", c.variance_threshold},
        {"snapshot_every", c.snapshot_every}, {"pose_provider", c.pose_provider}, {"densifier", c.densifier},
        {"queue_capacity", c.engine.queue_capacity}}},
      {"frames_ingested", report.engine.frames_ingested},
      {"frames_skipped", report.frames_skipped},
      {"frames_fused", report.frames_fused},
      {"aborted", report.engine.aborted},
      {"error", report.engine.error},
      {"seconds", report.engine.seconds},
      {"stages", stages},
      {"diagnostics", diags},
      {"outputs", report.outputs},
  };
}

}  // namespace aeromap
