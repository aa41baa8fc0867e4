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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "aeromap/errors.hpp"
#include "aeromap/pipeline.hpp"
#include "aeromap/synth.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kAbort = 3;

int print_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot read " << path << "\n";
    return kConfigError;
  }
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "malformed report: " << e.what() << "\n";
    return kConfigError;
  }
  std::cout << fmt::format("frames ingested {}, fused {}, skipped {}{}\n", report.value("frames_ingested", 0),
                           report.value("frames_fused", 0), report.value("frames_skipped", 0),
                           report.value("aborted", false) ? " (aborted)" : "");
  for (const auto& stage : report.value("stages", nlohmann::json::array())) {
    std::cout << fmt::format("\n{}: {} in, {} out\n", stage.value("name", "?"), stage.value("frames_in", 0),
                             stage.value("frames_out", 0));
    std::cout << fmt::format("  {:>9} {:>8} {:>8} {:>8}\n", "t [s]", "f_in", "f_out", "delta");
    // one line per second of run time keeps long histories readable
    double next = 0.0;
    for (const auto& h : stage["history"]) {
      const double t = h["t"].get<double>();
      if (t < next) continue;
      next = std::floor(t) + 1.0;
      const auto& d = h["delta_perf"];
      std::cout << fmt::format("  {:9.2f} {:8.2f} {:8.2f} {:>8}\n", t, h["f_in"].get<double>(),
                               h["f_out"].get<double>(), d.is_null() ? "-" : fmt::format("{:.2f}", d.get<double>()));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental orthomosaic and elevation mapping"};
  app.require_subcommand(1);
  spdlog::set_level(spdlog::level::warn);

  aeromap::PipelineConfig config;
  std::string mode = "gnss";
  std::string input, output;
  double gsd = 0.0;
  double keyframe = -1.0;
  bool no_fallback = false;
  bool verbose = false;
  auto* run = app.add_subcommand("run", "Run the mapping pipeline on a dataset directory");
  run->add_option("--mode", mode, "gnss | visual | elevation")
      ->check(CLI::IsMember({"gnss", "visual", "elevation"}));
  run->add_option("--input", input, "Dataset directory (camera.txt, frames/)")->required();
  run->add_option("--output", output, "Output directory")->required();
  run->add_option("--gsd", gsd, "Output ground sampling distance in meters (default: native)");
  run->add_option("--variance-threshold", config.variance_threshold, "Elevation variance threshold in m^2");
  run->add_option("--snapshot-every", config.snapshot_every, "Export a snapshot every N fused frames");
  run->add_option("--pose-provider", config.pose_provider, "synthetic | none")
      ->check(CLI::IsMember({"synthetic", "none"}));
  run->add_option("--densifier", config.densifier, "groundtruth | blockmatch | none")
      ->check(CLI::IsMember({"groundtruth", "blockmatch", "none"}));
  run->add_option("--depth-stride", config.depth_stride, "Pixel stride when lifting depth maps");
  run->add_option("--keyframe-distance", keyframe, "Keyframe translation threshold in meters");
  run->add_option("--queue-capacity", config.engine.queue_capacity, "Frames per stage input queue");
  run->add_option("--replay-rate", config.engine.replay_rate, "Feed frames at this rate in Hz (0: unpaced)");
  run->add_flag("--no-fallback", no_fallback, "Drop frames without a visual pose");
  run->add_flag("-v,--verbose", verbose, "Log progress");

  std::string spec_path, synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--spec", spec_path, "Scene specification (JSON)")->required();
  synth->add_option("--out", synth_out, "Dataset directory")->required();

  std::string report_path;
  auto* stats = app.add_subcommand("stats", "Print the throughput history of a run report");
  stats->add_option("report", report_path, "report.json")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) {
      if (verbose) spdlog::set_level(spdlog::level::info);
      config.mode = aeromap::parse_mode(mode);
      config.input = input;
      config.output = output;
      if (gsd > 0.0) config.gsd = gsd;
      if (keyframe >= 0.0) config.keyframe_distance = keyframe;
      config.fallback = !no_fallback;
      if (config.mode == aeromap::Mode::Elevation && config.densifier == "none" && config.pose_provider == "synthetic")
        config.densifier = "groundtruth";
      const auto report = aeromap::run_pipeline(config);
      std::cout << fmt::format("{} frames ingested, {} fused, {} skipped in {:.1f} s\n",
                               report.engine.frames_ingested, report.frames_fused, report.frames_skipped,
                               report.engine.seconds);
      if (report.engine.aborted) {
        std::cerr << "pipeline aborted: " << report.engine.error << "\n";
        return kAbort;
      }
      return 0;
    }
    if (*synth) {
      const auto spec = aeromap::synth::load_scene(spec_path);
      aeromap::synth::generate(spec, synth_out);
      std::cout << fmt::format("{} frames written to {}\n", aeromap::synth::plan_flight(spec).size(), synth_out);
      return 0;
    }
    if (*stats) return print_stats(report_path);
  } catch (const aeromap::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAbort;
  }
  return 0;
}
