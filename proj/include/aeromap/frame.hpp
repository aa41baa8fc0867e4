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

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "aeromap/camera.hpp"
#include "aeromap/geodesy.hpp"
#include "aeromap/grid.hpp"
#include "aeromap/image.hpp"

namespace aeromap {

struct CloudPoint {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::array<std::uint8_t, 3> color{0, 0, 0};
};

using PointCloud = std::vector<CloudPoint>;

/// Counts live instances of the owning type and tracks the high-water mark.
class LiveCounter {
 public:
  LiveCounter() { increment(); }
  LiveCounter(const LiveCounter&) { increment(); }
  LiveCounter(LiveCounter&&) noexcept { increment(); }
  LiveCounter& operator=(const LiveCounter&) = default;
  LiveCounter& operator=(LiveCounter&&) noexcept = default;
  ~LiveCounter() { live_.fetch_sub(1, std::memory_order_relaxed); }

  static long live() { return live_.load(); }
  static long peak() { return peak_.load(); }
  static void reset_peak() { peak_.store(live_.load()); }

 private:
  static void increment() {
    const long now = live_.fetch_add(1, std::memory_order_relaxed) + 1;
    long prev = peak_.load(std::memory_order_relaxed);
    while (now > prev && !peak_.compare_exchange_weak(prev, now, std::memory_order_relaxed)) {
    }
  }

  static inline std::atomic<long> live_{0};
  static inline std::atomic<long> peak_{0};
};

/// Unit of pipeline flow. Each stage fills in its own fields and hands the
/// frame on; downstream stages treat earlier fields as read-only.
struct Frame {
  std::uint64_t id = 0;
  double timestamp = 0.0;
  Image image;
  GeoPoint geotag;
  double heading = 0.0;     // degrees clockwise from north
  bool stabilized = true;   // gimbal holds the camera nadir
  CameraModel camera;

  std::optional<UtmCoord> utm;  // geotag in the run's locked zone
  std::optional<Pose> pose;
  std::optional<PointCloud> sparse_cloud;
  std::optional<PointCloud> dense_cloud;
  std::optional<LayeredGrid> surface;
  std::optional<RegionOfInterest> footprint;
  double surface_gsd = 0.0;  // resolution of the surface model before rectification

  LiveCounter live;
};

}  // namespace aeromap
