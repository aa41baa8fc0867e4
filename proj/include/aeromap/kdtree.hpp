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
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace aeromap {

/// Balanced 2-D kd-tree over (easting, northing) positions. Payload is the
/// index into the input vector. Equal distances are ordered by index, so
/// results match a brute-force scan exactly.
class KdTree2 {
 public:
  struct Neighbor {
    std::size_t index = 0;
    double distance = 0.0;
  };

  KdTree2() = default;
  explicit KdTree2(std::vector<Eigen::Vector2d> points);

  std::size_t size() const { return points_.size(); }
  const Eigen::Vector2d& point(std::size_t i) const { return points_[i]; }

  /// Nearest point, optionally skipping one index (self queries).
  std::optional<Neighbor> nearest(const Eigen::Vector2d& query,
                                  std::optional<std::size_t> exclude = std::nullopt) const;

  /// Up to k nearest points, ascending.
  std::vector<Neighbor> knn(const Eigen::Vector2d& query, std::size_t k,
                            std::optional<std::size_t> exclude = std::nullopt) const;

  /// Points with distance <= radius, ascending, at most max_results of them.
  std::vector<Neighbor> radius_search(const Eigen::Vector2d& query, double radius,
                                      std::size_t max_results = std::numeric_limits<std::size_t>::max()) const;

 private:
  struct Node {
    std::size_t point = 0;
    int axis = 0;
  };

  void build(std::size_t lo, std::size_t hi);
  template <typename Visitor>
  void search(std::size_t lo, std::size_t hi, const Eigen::Vector2d& q, Visitor& visitor) const;

  std::vector<Eigen::Vector2d> points_;
  std::vector<Node> nodes_;  // implicit tree: node of [lo, hi) sits at (lo + hi) / 2
};

}  // namespace aeromap
