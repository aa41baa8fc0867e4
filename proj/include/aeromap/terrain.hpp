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

#include <optional>

#include <Eigen/Core>

namespace aeromap {

/// Height field z = height(easting, northing) with a bounded slope.
class Terrain {
 public:
  virtual ~Terrain() = default;

  virtual double height(double easting, double northing) const = 0;
  virtual double min_height() const = 0;
  virtual double max_height() const = 0;
  /// Upper bound on |grad height|.
  virtual double max_slope() const = 0;

  /// First intersection of origin + t * direction (t > 0) with the surface,
  /// returned as the ray parameter t. Conservative marching guided by the
  /// slope bound, refined by bisection to well below a micrometre.
  std::optional<double> raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction) const;
};

}  // namespace aeromap
