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


// Serial reference versus OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "aeromap/densify.hpp"
#include "aeromap/mosaic.hpp"
#include "aeromap/rectify.hpp"
#include "aeromap/surface.hpp"
#include "aeromap/synth.hpp"

namespace aeromap {
namespace {

Execution exec_of(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

struct Fixture {
  synth::SceneSpec spec;
  std::shared_ptr<Terrain> terrain;
  std::unique_ptr<synth::GroundTexture> texture;
  Frame frame;  // rendered, posed, with depth-derived cloud and elevated surface

  Fixture() {
    spec.extent_x = 60.0;
    spec.extent_y = 40.0;
    spec.heightfield.type = "ridge";
    spec.heightfield.amplitude = 8.0;
    spec.heightfield.half_width = 15.0;
    spec.texture.type = "noise";
    spec.texture.margin = 30.0;
    terrain = synth::make_terrain(spec);
    texture = std::make_unique<synth::GroundTexture>(spec);
    const auto plan = synth::plan_flight(spec);
    frame.id = 0;
    frame.camera = spec.camera;
    frame.pose = plan[plan.size() / 4].pose;
    frame.image = synth::render(frame.camera, *frame.pose, *terrain, *texture);
    densify::GroundTruthDensifier densifier(terrain);
    const Frame* window[] = {&frame};
    const auto depth = densifier.densify(window, 0);
    frame.dense_cloud = densify::depth_to_cloud(frame, *depth, 2);
    frame.footprint = surface::frame_footprint(frame, surface::median_elevation(*frame.dense_cloud));
    frame.surface = surface::build_elevated_dsm(*frame.footprint, *frame.dense_cloud);
    frame.surface_gsd = frame.surface->gsd();
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_Render(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(synth::render(f.frame.camera, *f.frame.pose, *f.terrain, *f.texture, exec_of(state)));
}
BENCHMARK(BM_Render)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GroundTruthDepth(benchmark::State& state) {
  const auto& f = fixture();
  densify::GroundTruthDensifier densifier(f.terrain, exec_of(state));
  const Frame* window[] = {&f.frame};
  for (auto _ : state) benchmark::DoNotOptimize(densifier.densify(window, 0));
}
BENCHMARK(BM_GroundTruthDepth)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ElevatedDsm(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        surface::build_elevated_dsm(*f.frame.footprint, *f.frame.dense_cloud, {}, exec_of(state)));
}
BENCHMARK(BM_ElevatedDsm)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Rectify(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(rectify::rectify(f.frame, 0.1, std::nullopt, exec_of(state)));
}
BENCHMARK(BM_Rectify)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// per-cell project() path kept as the reference implementation
void BM_RectifyReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(rectify::rectify_reference(f.frame, 0.1));
}
BENCHMARK(BM_RectifyReference)->Unit(benchmark::kMillisecond);

void BM_Resample(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(resample(*f.frame.surface, 0.1, default_interpolation, std::nullopt, exec_of(state)));
}
BENCHMARK(BM_Resample)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MosaicFuse(benchmark::State& state) {
  const auto& f = fixture();
  const LayeredGrid update = rectify::rectify(f.frame, 0.1);
  for (auto _ : state) {
    mosaic::GlobalMap map;
    for (int k = 0; k < 4; ++k) map.fuse(update, exec_of(state));
    benchmark::DoNotOptimize(map.grid());
  }
}
BENCHMARK(BM_MosaicFuse)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace aeromap

BENCHMARK_MAIN();
