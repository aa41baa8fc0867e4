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

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "aeromap/camera.hpp"
#include "aeromap/frame.hpp"
#include "aeromap/synth.hpp"

namespace aeromap::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("aeromap_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline CameraModel test_camera() { return {240.0, 240.0, 127.5, 95.5, 256, 192}; }

inline UtmCoord utm_at(double e, double n, double alt) { return {e, n, 32, true, alt}; }

/// Random rotation from a uniformly drawn unit quaternion.
inline Eigen::Matrix3d random_rotation(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

/// Small scene: 40 x 30 m, two flight lines, flat unless changed.
inline synth::SceneSpec small_scene() {
  synth::SceneSpec s;
  s.extent_x = 40.0;
  s.extent_y = 30.0;
  s.flight.line_spacing = 15.0;
  s.texture.margin = 30.0;
  s.texture.gsd = 0.05;
  return s;
}

}  // namespace aeromap::testing
