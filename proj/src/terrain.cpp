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

#include "aeromap/terrain.hpp"

#include <algorithm>
#include <cmath>

namespace aeromap {

std::optional<double> Terrain::raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& direction) const {
  const double zmin = min_height();
  const double zmax = max_height();
  const double dz = direction.z();
  const double dxy = direction.head<2>().norm();
  auto gap = [&](double t) {
    const Eigen::Vector3d p = origin + t * direction;
    return p.z() - height(p.x(), p.y());
  };

  if (zmax - zmin <= 0.0) {
    if (dz == 0.0) return std::nullopt;
    const double t = (zmin - origin.z()) / dz;
    if (t > 0.0) return t;
    return std::nullopt;
  }

  // Only the slab between zmin and zmax can hold a crossing.
  double t0 = 0.0;
  double t1 = 0.0;
  if (dz < 0.0) {
    t0 = std::max(0.0, (zmax - origin.z()) / dz);
    // a hair below the floor so rounding cannot skip the last crossing
    t1 = (zmin - 1e-9 * (1.0 + std::abs(zmin)) - origin.z()) / dz;
  } else {
    if (origin.z() > zmax || dz == 0.0) return std::nullopt;
    t1 = dz > 0.0 ? (zmax - origin.z()) / dz : 0.0;
  }
  if (!(t1 > t0)) return std::nullopt;

  const double rate = std::abs(dz) + max_slope() * dxy;
  const double min_step = 0.02 / std::max(direction.norm(), 1e-12);
  double t = t0;
  double g = gap(t);
  if (g <= 0.0) return t > 0.0 ? std::optional<double>(t) : std::nullopt;
  while (t < t1) {
    const double step = std::max(g / rate, min_step);
    const double tn = std::min(t + step, t1);
    const double gn = gap(tn);
    if (gn <= 0.0) {
      double lo = t;
      double hi = tn;
      for (int i = 0; i < 80 && hi - lo > 1e-12 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    t = tn;
    g = gn;
  }
  return std::nullopt;
}

}  // namespace aeromap
