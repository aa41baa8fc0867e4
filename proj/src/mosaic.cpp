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

#include "aeromap/mosaic.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "aeromap/errors.hpp"

namespace aeromap::mosaic {

double blend_mean(double mean, long n, double x) {
  const double nd = double(n);
  return nd / (nd + 1.0) * mean + x / (nd + 1.0);
}

double blend_variance(double variance, long n, double mean, double x) {
  const double nd = double(n);
  const double d = x - mean;
  return (nd - 1.0) / nd * variance + d * d / (nd + 1.0);
}

void BlendConfig::validate() const {
  if (!(variance_threshold > 0.0)) throw ConfigError("variance threshold must be positive");
}

CellState initial_cell(const Observation& obs) { return {Track::start(obs), std::nullopt, 1}; }

void select_primary(CellState& state) {
  if (state.hypothesis && state.hypothesis->selection_variance() < state.primary.selection_variance())
    std::swap(state.primary, *state.hypothesis);
}

CellState fuse_cell(CellState state, const Observation& obs, const BlendConfig& config) {
  const bool to_hypothesis =
      state.hypothesis &&
      std::abs(obs.elevation - state.hypothesis->mean) < std::abs(obs.elevation - state.primary.mean);
  Track& track = to_hypothesis ? *state.hypothesis : state.primary;
  const double variance = blend_variance(track.variance, track.n, track.mean, obs.elevation);
  if (!(variance <= config.variance_threshold)) return resolve_hypothesis(std::move(state), obs, config);

  ++state.observations;
  track.mean = blend_mean(track.mean, track.n, obs.elevation);
  track.variance = variance;
  ++track.n;
  if (!config.angle_tiebreak || obs.angle <= track.angle) {
    track.color = obs.color;
    track.angle = obs.angle;
  }
  select_primary(state);
  return state;
}

CellState resolve_hypothesis(CellState state, const Observation& obs, const BlendConfig&) {
  ++state.observations;
  state.hypothesis = Track::start(obs);
  select_primary(state);
  return state;
}

namespace {

struct MapLayers {
  LayeredGrid::Raster *valid, *elevation, *variance, *count, *observations, *r, *g, *b, *angle;
  LayeredGrid::Raster *h_elevation, *h_variance, *h_count, *h_r, *h_g, *h_b, *h_angle;

  explicit MapLayers(LayeredGrid& grid) {
    const auto get = [&](std::string_view name, double fill) { return &grid.add_layer(name, fill); };
    valid = get(layer::kValid, 0.0);
    elevation = get(layer::kElevation, LayeredGrid::no_data());
    variance = get(layer::kVariance, LayeredGrid::no_data());
    count = get(layer::kElevationCount, 0.0);
    observations = get(layer::kObservations, 0.0);
    r = get(layer::kColorR, LayeredGrid::no_data());
    g = get(layer::kColorG, LayeredGrid::no_data());
    b = get(layer::kColorB, LayeredGrid::no_data());
    angle = get(layer::kAngle, LayeredGrid::no_data());
    h_elevation = get(layer::kHypothesis, LayeredGrid::no_data());
    h_variance = get(layer::kHypothesisVariance, LayeredGrid::no_data());
    h_count = get(layer::kHypothesisCount, 0.0);
    h_r = get(layer::kHypothesisColorR, LayeredGrid::no_data());
    h_g = get(layer::kHypothesisColorG, LayeredGrid::no_data());
    h_b = get(layer::kHypothesisColorB, LayeredGrid::no_data());
    h_angle = get(layer::kHypothesisAngle, LayeredGrid::no_data());
  }

  CellState read(int i, int j) const {
    CellState s;
    s.primary = {(*elevation)(i, j), (*variance)(i, j), long((*count)(i, j)),
                 {(*r)(i, j), (*g)(i, j), (*b)(i, j)}, (*angle)(i, j)};
    s.observations = long((*observations)(i, j));
    if (!std::isnan((*h_elevation)(i, j)))
      s.hypothesis = Track{(*h_elevation)(i, j), (*h_variance)(i, j), long((*h_count)(i, j)),
                           {(*h_r)(i, j), (*h_g)(i, j), (*h_b)(i, j)}, (*h_angle)(i, j)};
    return s;
  }

  void write(int i, int j, const CellState& s) {
    (*valid)(i, j) = 1.0;
    (*elevation)(i, j) = s.primary.mean;
    (*variance)(i, j) = s.primary.variance;
    (*count)(i, j) = double(s.primary.n);
    (*observations)(i, j) = double(s.observations);
    (*r)(i, j) = s.primary.color.x();
    (*g)(i, j) = s.primary.color.y();
    (*b)(i, j) = s.primary.color.z();
    (*angle)(i, j) = s.primary.angle;
    const double nan = LayeredGrid::no_data();
    const Track* h = s.hypothesis ? &*s.hypothesis : nullptr;
    (*h_elevation)(i, j) = h ? h->mean : nan;
    (*h_variance)(i, j) = h ? h->variance : nan;
    (*h_count)(i, j) = h ? double(h->n) : 0.0;
    (*h_r)(i, j) = h ? h->color.x() : nan;
    (*h_g)(i, j) = h ? h->color.y() : nan;
    (*h_b)(i, j) = h ? h->color.z() : nan;
    (*h_angle)(i, j) = h ? h->angle : nan;
  }
};

}  // namespace

GlobalMap::GlobalMap(BlendConfig config, int growth_chunk) : config_(config), growth_chunk_(growth_chunk) {
  config_.validate();
  if (growth_chunk_ < 1) throw ConfigError("growth chunk must be positive");
}

std::optional<CellState> GlobalMap::cell(int row, int col) const {
  if (empty() || row < 0 || col < 0 || row >= grid_.rows() || col >= grid_.cols() || !grid_.valid(row, col))
    return std::nullopt;
  return MapLayers(const_cast<LayeredGrid&>(grid_)).read(row, col);
}

void GlobalMap::fuse(const LayeredGrid& input, Execution exec) {
  for (auto name : {layer::kElevation, layer::kValid, layer::kColorR, layer::kColorG, layer::kColorB})
    if (!input.has_layer(name)) throw DomainError("update lacks layer '" + std::string(name) + "'");
  if (input.empty()) return;

  if (grid_.empty()) {
    grid_ = LayeredGrid(input.anchor(), input.gsd(), input.row_offset(), input.col_offset(), input.rows(),
                        input.cols());
  }
  const LayeredGrid update = lattice_aligned(grid_, input)
                                 ? input
                                 : resample(input, grid_.gsd(), default_interpolation, grid_.anchor(), exec);
  grid_ = grow(grid_, update.extent(), growth_chunk_);
  MapLayers layers(grid_);
  // cells added by growing start out as no-data
  for (auto* raster : {layers.valid, layers.count, layers.observations, layers.h_count})
    *raster = raster->isNaN().select(0.0, *raster);

  const auto offset = lattice_offset(grid_, update);
  const int dr = int(offset.first);
  const int dc = int(offset.second);
  const auto& u_valid = update.layer(layer::kValid);
  const auto& u_elev = update.layer(layer::kElevation);
  const auto& u_r = update.layer(layer::kColorR);
  const auto& u_g = update.layer(layer::kColorG);
  const auto& u_b = update.layer(layer::kColorB);
  const LayeredGrid::Raster* u_angle = update.has_layer(layer::kAngle) ? &update.layer(layer::kAngle) : nullptr;

  const int rows = update.rows();
  const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < update.cols(); ++j) {
      if (u_valid(i, j) != 1.0) continue;
      Observation obs;
      obs.elevation = u_elev(i, j);
      obs.color = {u_r(i, j), u_g(i, j), u_b(i, j)};
      obs.angle = u_angle ? (*u_angle)(i, j) : 0.0;
      if (std::isnan(obs.elevation) || !obs.color.allFinite()) continue;
      const int gi = dr + i;
      const int gj = dc + j;
      const CellState next = (*layers.valid)(gi, gj) == 1.0 ? fuse_cell(layers.read(gi, gj), obs, config_)
                                                             : initial_cell(obs);
      layers.write(gi, gj, next);
    }
  }
  ++fused_;
}

MosaicStage::MosaicStage(MosaicConfig config, SnapshotSink sink)
    : config_(config), sink_(std::move(sink)), map_(config.blend, config.growth_chunk) {}

void MosaicStage::process(Frame frame, const Emit& emit) {
  if (!frame.surface) {
    report(std::int64_t(frame.id), "frame without rectified surface dropped");
    return;
  }
  try {
    map_.fuse(*frame.surface, config_.exec);
  } catch (const DomainError& e) {
    report(std::int64_t(frame.id), std::string("fusion failed: ") + e.what());
    return;
  }
  if (sink_ && config_.snapshot_every > 0 && map_.fused() % config_.snapshot_every == 0) {
    const LayeredGrid copy = map_.grid();
    sink_(copy, map_.fused());
  }
  // the map now owns the data; pass on only the lightweight record
  frame.image = Image();
  frame.surface.reset();
  frame.dense_cloud.reset();
  frame.sparse_cloud.reset();
  emit(std::move(frame));
}

}  // namespace aeromap::mosaic
