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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "aeromap/camera.hpp"
#include "aeromap/exec.hpp"
#include "aeromap/frame.hpp"
#include "aeromap/grid.hpp"
#include "aeromap/image.hpp"
#include "aeromap/pose_stage.hpp"
#include "aeromap/terrain.hpp"

namespace aeromap::synth {

struct HeightfieldSpec {
  std::string type = "flat";  // flat | ramp | ridge | smooth-random
  double elevation = 0.0;     // base level
  double slope_x = 0.0;       // ramp: dz/de
  double slope_y = 0.0;       // ramp: dz/dn
  double amplitude = 10.0;    // ridge, smooth-random
  double half_width = 25.0;   // ridge: distance from the crest to the foot
  double angle_deg = 90.0;    // ridge: crest direction, counterclockwise from east
  double wavelength = 30.0;   // smooth-random: shortest wavelength
  int components = 6;
  std::uint32_t seed = 1;
};

struct TextureSpec {
  std::string type = "checkerboard";  // checkerboard | noise
  double cell = 5.0;                  // checker size or noise feature size, meters
  double sharpness = 3.0;             // checker edge steepness
  double gsd = 0.05;
  double margin = 30.0;               // texture border beyond the scene extent
  std::uint32_t seed = 1;
};

struct FlightSpec {
  double altitude = 40.0;
  double speed = 5.0;
  double line_spacing = 21.0;
  double frame_rate = 2.0;
};

struct NoiseSpec {
  double gnss_sigma = 0.0;     // meters, per axis
  double heading_sigma = 0.0;  // degrees
  std::uint32_t seed = 7;
};

/// How the synthetic pose provider distorts truth into its visual frame.
struct ProviderSpec {
  double scale = 1.0;
  double yaw_deg = 0.0;
  Eigen::Vector3d offset = Eigen::Vector3d::Zero();
  double jitter = 0.0;  // visual-frame position noise
  std::uint32_t seed = 11;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> lost;  // inclusive id ranges
  std::size_t initializing = 0;                               // leading frames still initializing
  int sparse_grid = 8;                                        // sparse points per image side
};

struct SceneSpec {
  double origin_easting = 600000.0;
  double origin_northing = 5760000.0;
  int zone = 32;
  bool north = true;
  double extent_x = 100.0;
  double extent_y = 100.0;
  HeightfieldSpec heightfield;
  TextureSpec texture;
  CameraModel camera{240.0, 240.0, 127.5, 95.5, 256, 192};
  FlightSpec flight;
  NoiseSpec noise;
  ProviderSpec provider;

  void validate() const;
};

SceneSpec scene_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const SceneSpec& spec);
SceneSpec load_scene(const std::filesystem::path& path);

std::shared_ptr<Terrain> make_terrain(const SceneSpec& spec);

/// RGB ground texture raster, row 0 at the north edge.
class GroundTexture {
 public:
  explicit GroundTexture(const SceneSpec& spec);

  /// Bilinear lookup at a world position, clamped at the raster border.
  Eigen::Vector3d sample(double easting, double northing) const;
  const Image& image() const { return image_; }
  /// Empty grid describing the raster geometry.
  LayeredGrid geometry() const;

 private:
  Image image_;
  Eigen::Vector2d origin_;  // south-west corner
  double gsd_ = 0.0;
};

struct FlightFrame {
  std::uint64_t id = 0;
  double timestamp = 0.0;
  Pose pose;            // exact
  GeoPoint geotag;      // with sensor noise
  double heading = 0.0; // with sensor noise
};

/// Serpentine over the scene: east-west lines `line_spacing` apart, heading
/// along the direction of travel.
std::vector<FlightFrame> plan_flight(const SceneSpec& spec);

Image render(const CameraModel& camera, const Pose& pose, const Terrain& terrain, const GroundTexture& texture,
             Execution exec = Execution::Parallel);

/// Rendered frames ready for the pipeline.
std::vector<Frame> synthesize_frames(const SceneSpec& spec, Execution exec = Execution::Parallel);

/// Writes frames/, camera.txt and truth/ (poses.txt, heightfield.asc,
/// ortho.png + .pgw, scene.json) under `out_dir`.
void generate(const SceneSpec& spec, const std::filesystem::path& out_dir, Execution exec = Execution::Parallel);

void write_truth_poses(const std::filesystem::path& path, const std::vector<FlightFrame>& frames);
std::map<std::uint64_t, Pose> read_truth_poses(const std::filesystem::path& path);

/// Truth poses seen through an unknown similarity: c_v = R0^T (c - t0) / s0,
/// R_v = R0^T R, plus optional jitter and scripted Lost/Initializing frames.
class SyntheticPoseProvider final : public pose::PoseProvider {
 public:
  SyntheticPoseProvider(std::map<std::uint64_t, Pose> truth, ProviderSpec spec,
                        std::shared_ptr<const Terrain> terrain = nullptr);

  pose::TrackResult track(const Frame& frame) override;

 private:
  std::map<std::uint64_t, Pose> truth_;
  ProviderSpec spec_;
  std::shared_ptr<const Terrain> terrain_;
  Eigen::Matrix3d yaw_;
  std::mt19937 rng_;
  std::size_t calls_ = 0;
};

/// Cells whose true surface point is seen by at least one of the poses.
LayeredGrid::Raster footprint_mask(const LayeredGrid& grid, const Terrain& terrain, const CameraModel& camera,
                                   const std::vector<Pose>& poses);

struct ElevationComparison {
  double rmse = 0.0;
  double coverage = 0.0;
  std::size_t valid_cells = 0;
  std::size_t footprint_cells = 0;
  std::size_t covered_cells = 0;
};

/// RMSE of 'elevation' over valid cells (non-NaN, and flagged when a 'valid'
/// layer exists) against the terrain at cell centers;
/// coverage is the valid share of the cells set in `footprint` (1 without one).
ElevationComparison compare_elevation(const LayeredGrid& result, const Terrain& truth,
                                      const LayeredGrid::Raster* footprint = nullptr);

}  // namespace aeromap::synth
