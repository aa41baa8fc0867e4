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


#include <chrono>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "aeromap/errors.hpp"
#include "aeromap/export.hpp"
#include "aeromap/grid_io.hpp"
#include "aeromap/pipeline.hpp"
#include "aeromap/synth.hpp"
#include "support.hpp"

namespace aeromap {
namespace {

using testing::TempDir;

void write_text(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kCamera = "fx: 240\nfy: 240\ncx: 3.5\ncy: 2.5\nwidth: 8\nheight: 6\n";

std::string sidecar(int id, double t, bool with_heading = true) {
  std::string s = "id: " + std::to_string(id) + "\ntimestamp: " + std::to_string(t) +
                  "\nlatitude: 52.0\nlongitude: 10.2\naltitude: 40\n";
  if (with_heading) s += "heading: 90\n";
  return s;
}

TEST(Ingest, KeyValueParsing) {
  const auto kv = parse_key_values("# comment\n a : 1 \n\nb:two words\n");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"a", "1"}));
  EXPECT_EQ(kv[1].second, "two words");
  EXPECT_THROW(parse_key_values("no colon here"), IoError);
}

TEST(Ingest, MinimalSidecarAndMissingHeading) {
  TempDir dir("sidecar");
  write_text(dir.path() / "a.txt", sidecar(7, 1.5) + "stabilized: 0\n");
  const FrameMeta m = parse_sidecar(dir.path() / "a.txt");
  EXPECT_EQ(m.id, 7u);
  EXPECT_DOUBLE_EQ(m.timestamp, 1.5);
  EXPECT_DOUBLE_EQ(m.geotag.latitude, 52.0);
  EXPECT_DOUBLE_EQ(m.heading, 90.0);
  EXPECT_FALSE(m.stabilized);
  write_text(dir.path() / "b.txt", sidecar(8, 2.0, false));
  EXPECT_THROW(parse_sidecar(dir.path() / "b.txt"), IoError);
  write_text(dir.path() / "c.txt", sidecar(8, 2.0) + "latitude: abc\n");
  EXPECT_THROW(parse_sidecar(dir.path() / "c.txt"), IoError);
}

TEST(Ingest, CameraFileErrorsAreConfigErrors) {
  TempDir dir("camera");
  write_text(dir.path() / "ok.txt", kCamera);
  const CameraModel c = read_camera_file(dir.path() / "ok.txt");
  EXPECT_EQ(c.width, 8);
  write_text(dir.path() / "bad.txt", "fx: 240\n");
  EXPECT_THROW(read_camera_file(dir.path() / "bad.txt"), ConfigError);
  write_text(dir.path() / "neg.txt", "fx: -1\nfy: 240\ncx: 3.5\ncy: 2.5\nwidth: 8\nheight: 6\n");
  EXPECT_THROW(read_camera_file(dir.path() / "neg.txt"), ConfigError);
}

TEST(Ingest, DirectorySourceOrdersByTimestampAndSkipsBadFrames) {
  TempDir dir("dirsource");
  const auto frames = dir.path() / "frames";
  std::filesystem::create_directories(frames);
  write_text(dir.path() / "camera.txt", kCamera);
  Image rgb(8, 6);
  rgb.set(1, 1, {9, 8, 7});
  write_png(frames / "a.png", rgb);
  write_text(frames / "a.txt", sidecar(1, 5.0));
  // gray input is replicated to three channels
  write_png_gray16(frames / "b.png", 8, 6, std::vector<std::uint16_t>(48, 0x4000));
  write_text(frames / "b.txt", sidecar(2, 1.0));
  write_png(frames / "c.png", rgb);
  write_text(frames / "c.txt", sidecar(3, 2.0, false));
  write_text(frames / "d.txt", sidecar(4, 3.0));  // no image
  write_png(frames / "e.png", Image(4, 4));
  write_text(frames / "e.txt", sidecar(5, 4.0));  // wrong size

  Diagnostics diag;
  DirectorySource src(dir.path(), &diag);
  std::vector<Frame> got;
  while (auto f = src.next()) got.push_back(std::move(*f));
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].id, 2u);
  EXPECT_EQ(got[0].image.rgb(0, 0), (std::array<std::uint8_t, 3>{0x40, 0x40, 0x40}));
  EXPECT_EQ(got[1].id, 1u);
  EXPECT_EQ(got[1].image.rgb(1, 1), (std::array<std::uint8_t, 3>{9, 8, 7}));
  EXPECT_EQ(src.skipped(), 3u);
  EXPECT_EQ(diag.size(), 3u);
}

TEST(Ingest, EmptyDirectoryNeedsNoCamera) {
  TempDir dir("empty");
  DirectorySource src(dir.path());
  EXPECT_FALSE(src.next());
  EXPECT_THROW(DirectorySource(dir.path() / "missing"), ConfigError);
}

TEST(Export, OnePixelMap) {
  TempDir dir("export");
  LayeredGrid g = create({10, 20, 10.5, 20.5}, 0.5, {});
  g.add_layer(layer::kValid, 1.0);
  g.add_layer(layer::kElevation, 1.25);
  g.add_layer(layer::kVariance, 0.0);
  g.add_layer(layer::kObservations, 3.0);
  for (auto n : {layer::kColorR, layer::kColorG, layer::kColorB}) g.add_layer(n, 100.0);
  export_snapshot(g, dir.path(), true);
  const Image img = read_png(dir.path() / "ortho.png");
  EXPECT_EQ(img.width(), 1);
  EXPECT_EQ(img.height(), 1);
  std::ifstream pgw(dir.path() / "ortho.pgw");
  std::vector<double> lines;
  for (double v; pgw >> v;) lines.push_back(v);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_DOUBLE_EQ(lines[0], 0.5);
  const LayeredGrid back = read_ascii_grid(dir.path() / "elevation.asc");
  EXPECT_EQ(back.layer(layer::kElevation)(0, 0), 1.25);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "dense.ply"));
  EXPECT_THROW(export_snapshot(LayeredGrid(), dir.path()), DomainError);
}

/// Passes frames on, optionally holding the last one until flush, sleeping,
/// dropping odd ids or throwing on one id.
class TestStage final : public Stage {
 public:
  std::string label = "test";
  bool drop_odd = false;
  std::optional<std::uint64_t> throw_on;
  std::vector<std::uint64_t> seen;

  std::string name() const override { return label; }
  void process(Frame frame, const Emit& emit) override {
    seen.push_back(frame.id);
    if (throw_on && frame.id == *throw_on) throw std::runtime_error("kaputt");
    if (drop_odd && frame.id % 2 == 1) return;
    emit(std::move(frame));
  }
};

/// Lazily produced frames so that the source itself holds none.
class CountingSource final : public FrameSource {
 public:
  explicit CountingSource(std::size_t n, std::size_t pixels = 64) : n_(n), pixels_(pixels) {}
  std::optional<Frame> next() override {
    if (i_ >= n_) return std::nullopt;
    Frame f;
    f.id = i_++;
    f.image = Image(int(pixels_), 1);
    return f;
  }

 private:
  std::size_t n_, pixels_, i_ = 0;
};

std::vector<std::unique_ptr<Stage>> test_stages(int n, std::vector<TestStage*>& handles) {
  std::vector<std::unique_ptr<Stage>> stages;
  for (int i = 0; i < n; ++i) {
    auto s = std::make_unique<TestStage>();
    s->label = "s" + std::to_string(i);
    handles.push_back(s.get());
    stages.push_back(std::move(s));
  }
  return stages;
}

TEST(Pipeline, IdsAreSubsequencesDownstream) {
  std::vector<TestStage*> h;
  auto stages = test_stages(4, h);
  h[1]->drop_odd = true;
  Pipeline p(std::move(stages), EngineOptions{});
  CountingSource src(500);
  std::vector<std::uint64_t> out;
  const EngineResult r = p.run(src, [&](Frame&& f) { out.push_back(f.id); });
  EXPECT_FALSE(r.aborted);
  EXPECT_EQ(r.frames_ingested, 500u);
  ASSERT_EQ(h[0]->seen.size(), 500u);
  for (std::size_t i = 0; i < 500; ++i) EXPECT_EQ(h[0]->seen[i], i);
  EXPECT_EQ(h[2]->seen.size(), 250u);
  EXPECT_EQ(out, h[3]->seen);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], 2 * i);
  EXPECT_EQ(r.stages[1].frames_in, 500u);
  EXPECT_EQ(r.stages[1].frames_out, 250u);
}

TEST(Pipeline, StageFailureAbortsRun) {
  std::vector<TestStage*> h;
  auto stages = test_stages(3, h);
  h[1]->throw_on = 40;
  Pipeline p(std::move(stages), EngineOptions{});
  CountingSource src(100000);
  const EngineResult r = p.run(src);
  EXPECT_TRUE(r.aborted);
  EXPECT_NE(r.error.find("kaputt"), std::string::npos);
  EXPECT_LT(r.frames_ingested, 100000u);
}

TEST(Pipeline, RequestStopEndsIngestion) {
  std::vector<TestStage*> h;
  Pipeline p(test_stages(2, h), EngineOptions{});
  CountingSource src(1000000);
  std::thread stopper([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    p.request_stop();
  });
  const EngineResult r = p.run(src);
  stopper.join();
  EXPECT_FALSE(r.aborted);
  EXPECT_LT(r.frames_ingested, 1000000u);
  EXPECT_EQ(h[1]->seen.size(), r.frames_ingested);
}

// Backpressure: the number of live frames does not grow with input length.
TEST(Pipeline, MemoryHighWaterIndependentOfInputLength) {
  auto peak_for = [](std::size_t n) {
    std::vector<TestStage*> h;
    EngineOptions opt;
    opt.queue_capacity = 4;
    opt.min_stage_seconds["s2"] = 0.0002;  // slowest stage in the middle
    Pipeline p(test_stages(5, h), opt);
    CountingSource src(n);
    LiveCounter::reset_peak();
    const long base = LiveCounter::live();
    p.run(src);
    return LiveCounter::peak() - base;
  };
  const long short_run = peak_for(300);
  const long long_run = peak_for(3276);
  EXPECT_LE(long_run, 5 * (4 + 3) + 2);
  EXPECT_LE(long_run, short_run + 2);
}

TEST(Pipeline, SteadyStateDeltaConvergesToOne) {
  std::vector<TestStage*> h;
  EngineOptions opt;
  opt.replay_rate = 40.0;
  opt.stats_window = 1.0;
  Pipeline p(test_stages(3, h), opt);
  CountingSource src(120);
  const EngineResult r = p.run(src);
  for (const auto& s : r.stages) {
    ASSERT_FALSE(s.history.empty());
    const RateSample last_in = [&] {
      for (auto it = s.history.rbegin(); it != s.history.rend(); ++it)
        if (it->time < r.seconds - 0.2 && it->time > 1.5) return *it;
      return s.history.back();
    }();
    EXPECT_NEAR(last_in.delta_perf, 1.0, 0.1) << s.name;
    EXPECT_NEAR(last_in.f_in, 40.0, 4.0) << s.name;
  }
}

TEST(Modes, ParseAndWiring) {
  EXPECT_EQ(parse_mode("gnss"), Mode::GnssOnly);
  EXPECT_EQ(parse_mode("visual"), Mode::VisualStitch);
  EXPECT_EQ(parse_mode("elevation"), Mode::Elevation);
  EXPECT_THROW(parse_mode("ortho"), ConfigError);
  for (Mode m : {Mode::GnssOnly, Mode::VisualStitch, Mode::Elevation}) {
    StageSetup s;
    s.mode = m;
    const auto stages = build_stages(std::move(s));
    std::vector<std::string> names;
    for (const auto& st : stages) names.push_back(st->name());
    if (m == Mode::Elevation)
      EXPECT_EQ(names, (std::vector<std::string>{"pose", "densify", "surface", "rectify", "mosaic"}));
    else
      EXPECT_EQ(names, (std::vector<std::string>{"pose", "surface", "rectify", "mosaic"}));
  }
}

TEST(RunPipeline, EmptyInputWritesOnlyReport) {
  TempDir in("run_empty_in"), out("run_empty_out");
  PipelineConfig cfg;
  cfg.input = in.path();
  cfg.output = out.path();
  const RunReport r = run_pipeline(cfg);
  EXPECT_EQ(r.engine.frames_ingested, 0u);
  EXPECT_TRUE(r.outputs.empty());
  EXPECT_TRUE(std::filesystem::exists(out.path() / "report.json"));
  EXPECT_FALSE(std::filesystem::exists(out.path() / "ortho.png"));
}

TEST(RunPipeline, ConfigErrors) {
  TempDir in("run_cfg_in"), out("run_cfg_out");
  PipelineConfig cfg;
  cfg.input = in.path();
  cfg.output = out.path();
  cfg.variance_threshold = 0.0;
  EXPECT_THROW(run_pipeline(cfg), ConfigError);
  cfg.variance_threshold = 1.0;
  cfg.mode = Mode::VisualStitch;
  cfg.pose_provider = "orb";
  EXPECT_THROW(run_pipeline(cfg), ConfigError);
  cfg.pose_provider = "synthetic";  // no truth/scene.json
  EXPECT_THROW(run_pipeline(cfg), ConfigError);
}

TEST(RunPipeline, GnssModeProducesMosaicAndReport) {
  TempDir data("run_gnss_in"), out("run_gnss_out");
  synth::SceneSpec spec = testing::small_scene();
  synth::generate(spec, data.path());
  PipelineConfig cfg;
  cfg.input = data.path();
  cfg.output = out.path();
  cfg.gsd = 0.25;
  cfg.snapshot_every = 2;
  const RunReport r = run_pipeline(cfg);
  EXPECT_FALSE(r.engine.aborted) << r.engine.error;
  EXPECT_GT(r.frames_fused, 2u);
  for (const char* f : {"ortho.png", "ortho.pgw", "elevation.asc", "elevation_variance.asc", "num_observations.png",
                        "report.json"})
    EXPECT_TRUE(std::filesystem::exists(out.path() / f)) << f;
  EXPECT_TRUE(std::filesystem::exists(out.path() / "snapshots" / "000002" / "ortho.png"));
  std::ifstream in(out.path() / "report.json");
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["config"]["mode"], "gnss");
  EXPECT_EQ(j["stages"].size(), 4u);
  EXPECT_EQ(j["frames_fused"], r.frames_fused);
  const LayeredGrid elev = read_ascii_grid(out.path() / "elevation.asc");
  EXPECT_DOUBLE_EQ(elev.gsd(), 0.25);
}

}  // namespace
}  // namespace aeromap
