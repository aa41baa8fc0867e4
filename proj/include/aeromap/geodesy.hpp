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

/// WGS84 position. Altitude is relative to the takeoff reference.
struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
  double altitude = 0.0;
};

struct UtmCoord {
  double easting = 0.0;
  double northing = 0.0;
  int zone = 0;
  bool north = true;
  double altitude = 0.0;

  Eigen::Vector3d position() const { return {easting, northing, altitude}; }
};

/// Axis-aligned UTM rectangle.
struct RegionOfInterest {
  double min_easting = 0.0;
  double min_northing = 0.0;
  double max_easting = 0.0;
  double max_northing = 0.0;

  double width() const { return max_easting - min_easting; }
  double height() const { return max_northing - min_northing; }
  bool contains(double e, double n) const {
    return e >= min_easting && e < max_easting && n >= min_northing && n < max_northing;
  }
  RegionOfInterest united(const RegionOfInterest& other) const;
  std::optional<RegionOfInterest> intersected(const RegionOfInterest& other) const;

  // Throws DomainError for non-finite bounds or an empty rectangle.
  void validate() const;
};

/// Central meridian based zone, floor((lon + 180) / 6) + 1, clamped to [1, 60].
int utm_zone_for(double longitude);
double utm_central_meridian(int zone);

/// Transverse Mercator forward projection (6th order Krueger series).
/// Throws DomainError beyond +-84 degrees latitude.
UtmCoord wgs84_to_utm(const GeoPoint& p, std::optional<int> forced_zone = std::nullopt);

/// Inverse projection; the zone and hemisphere of `c` are honoured.
GeoPoint utm_to_wgs84(const UtmCoord& c);

}  // namespace aeromap
