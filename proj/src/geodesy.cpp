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

#include "aeromap/geodesy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "aeromap/errors.hpp"

namespace aeromap {
namespace {

constexpr double kA = 6378137.0;
constexpr double kF = 1.0 / 298.257223563;
constexpr double kK0 = 0.9996;
constexpr double kFalseEasting = 500000.0;
constexpr double kFalseNorthingSouth = 10000000.0;
constexpr double kMaxLatitude = 84.0;
constexpr double kDeg = std::numbers::pi / 180.0;

// Series coefficients of the transverse Mercator projection to sixth order in
// the third flattening n.
struct KruegerSeries {
  double n;
  double e;
  double rectifying_radius;  // A
  std::array<double, 6> alpha;
  std::array<double, 6> beta;

  KruegerSeries() {
    n = kF / (2.0 - kF);
    e = std::sqrt(kF * (2.0 - kF));
    const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
    rectifying_radius = kA / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
    alpha = {
        n / 2.0 - 2.0 / 3.0 * n2 + 5.0 / 16.0 * n3 + 41.0 / 180.0 * n4 - 127.0 / 288.0 * n5 +
            7891.0 / 37800.0 * n6,
        13.0 / 48.0 * n2 - 3.0 / 5.0 * n3 + 557.0 / 1440.0 * n4 + 281.0 / 630.0 * n5 -
            1983433.0 / 1935360.0 * n6,
        61.0 / 240.0 * n3 - 103.0 / 140.0 * n4 + 15061.0 / 26880.0 * n5 + 167603.0 / 181440.0 * n6,
        49561.0 / 161280.0 * n4 - 179.0 / 168.0 * n5 + 6601661.0 / 7257600.0 * n6,
        34729.0 / 80640.0 * n5 - 3418889.0 / 1995840.0 * n6,
        212378941.0 / 319334400.0 * n6,
    };
    beta = {
        n / 2.0 - 2.0 / 3.0 * n2 + 37.0 / 96.0 * n3 - 1.0 / 360.0 * n4 - 81.0 / 512.0 * n5 +
            96199.0 / 604800.0 * n6,
        n2 / 48.0 + n3 / 15.0 - 437.0 / 1440.0 * n4 + 46.0 / 105.0 * n5 - 1118711.0 / 3870720.0 * n6,
        17.0 / 480.0 * n3 - 37.0 / 840.0 * n4 - 209.0 / 4480.0 * n5 + 5569.0 / 90720.0 * n6,
        4397.0 / 161280.0 * n4 - 11.0 / 504.0 * n5 - 830251.0 / 7257600.0 * n6,
        4583.0 / 161280.0 * n5 - 108847.0 / 3991680.0 * n6,
        20648693.0 / 638668800.0 * n6,
    };
  }
};

const KruegerSeries& series() {
  static const KruegerSeries s;
  return s;
}

// tan of the conformal latitude from tan of the geodetic latitude.
double conformal_tan(double tau, double e) {
  const double sigma = std::sinh(e * std::atanh(e * tau / std::hypot(1.0, tau)));
  return tau * std::hypot(1.0, sigma) - sigma * std::hypot(1.0, tau);
}

double geodetic_tan(double tau_prime, double e) {
  const double e2m = 1.0 - e * e;
  double tau = tau_prime;
  for (int i = 0; i < 10; ++i) {
    const double tp = conformal_tan(tau, e);
    const double dtau = (tau_prime - tp) * (1.0 + e2m * tau * tau) /
                        (e2m * std::hypot(1.0, tau) * std::hypot(1.0, tp));
    tau += dtau;
    if (std::abs(dtau) <= 1e-15 * std::max(1.0, std::abs(tau))) break;
  }
  return tau;
}

}  // namespace

RegionOfInterest RegionOfInterest::united(const RegionOfInterest& other) const {
  return {std::min(min_easting, other.min_easting), std::min(min_northing, other.min_northing),
          std::max(max_easting, other.max_easting), std::max(max_northing, other.max_northing)};
}

std::optional<RegionOfInterest> RegionOfInterest::intersected(const RegionOfInterest& other) const {
  RegionOfInterest r{std::max(min_easting, other.min_easting), std::max(min_northing, other.min_northing),
                     std::min(max_easting, other.max_easting), std::min(max_northing, other.max_northing)};
  if (r.max_easting <= r.min_easting || r.max_northing <= r.min_northing) return std::nullopt;
  return r;
}

void RegionOfInterest::validate() const {
  if (!std::isfinite(min_easting) || !std::isfinite(min_northing) || !std::isfinite(max_easting) ||
      !std::isfinite(max_northing))
    throw DomainError("region of interest has non-finite bounds");
  if (!(max_easting > min_easting) || !(max_northing > min_northing))
    throw DomainError("region of interest is degenerate");
}

int utm_zone_for(double longitude) {
  const int zone = static_cast<int>(std::floor((longitude + 180.0) / 6.0)) + 1;
  return std::clamp(zone, 1, 60);
}

double utm_central_meridian(int zone) { return -183.0 + 6.0 * zone; }

UtmCoord wgs84_to_utm(const GeoPoint& p, std::optional<int> forced_zone) {
  if (!std::isfinite(p.latitude) || !std::isfinite(p.longitude) || std::abs(p.longitude) > 180.0)
    throw DomainError("invalid geographic position");
  if (std::abs(p.latitude) > kMaxLatitude)
    throw DomainError("latitude " + std::to_string(p.latitude) + " outside the UTM domain");
  const int zone = forced_zone.value_or(utm_zone_for(p.longitude));
  if (zone < 1 || zone > 60) throw DomainError("UTM zone out of range");

  const KruegerSeries& s = series();
  double dlon = p.longitude - utm_central_meridian(zone);
  dlon = std::remainder(dlon, 360.0);
  const double lambda = dlon * kDeg;
  const double tau = std::tan(p.latitude * kDeg);
  const double tau_prime = conformal_tan(tau, s.e);

  const double xi_prime = std::atan2(tau_prime, std::cos(lambda));
  const double eta_prime = std::asinh(std::sin(lambda) / std::hypot(tau_prime, std::cos(lambda)));
  double xi = xi_prime;
  double eta = eta_prime;
  for (int j = 1; j <= 6; ++j) {
    const double a = s.alpha[j - 1];
    xi += a * std::sin(2.0 * j * xi_prime) * std::cosh(2.0 * j * eta_prime);
    eta += a * std::cos(2.0 * j * xi_prime) * std::sinh(2.0 * j * eta_prime);
  }

  UtmCoord out;
  out.zone = zone;
  out.north = p.latitude >= 0.0;
  out.easting = kFalseEasting + kK0 * s.rectifying_radius * eta;
  out.northing = kK0 * s.rectifying_radius * xi + (out.north ? 0.0 : kFalseNorthingSouth);
  out.altitude = p.altitude;
  return out;
}

GeoPoint utm_to_wgs84(const UtmCoord& c) {
  if (c.zone < 1 || c.zone > 60) throw DomainError("UTM zone out of range");
  const KruegerSeries& s = series();
  const double k = kK0 * s.rectifying_radius;
  const double xi = (c.northing - (c.north ? 0.0 : kFalseNorthingSouth)) / k;
  const double eta = (c.easting - kFalseEasting) / k;
  double xi_prime = xi;
  double eta_prime = eta;
  for (int j = 1; j <= 6; ++j) {
    const double b = s.beta[j - 1];
    xi_prime -= b * std::sin(2.0 * j * xi) * std::cosh(2.0 * j * eta);
    eta_prime -= b * std::cos(2.0 * j * xi) * std::sinh(2.0 * j * eta);
  }
  const double sinh_eta = std::sinh(eta_prime);
  const double cos_xi = std::cos(xi_prime);
  const double tau_prime = std::sin(xi_prime) / std::hypot(sinh_eta, cos_xi);
  const double lambda = std::atan2(sinh_eta, cos_xi);
  const double tau = geodetic_tan(tau_prime, s.e);

  GeoPoint p;
  p.latitude = std::atan(tau) / kDeg;
  p.longitude = std::remainder(utm_central_meridian(c.zone) + lambda / kDeg, 360.0);
  p.altitude = c.altitude;
  return p;
}

}  // namespace aeromap
