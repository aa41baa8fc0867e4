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


#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aeromap/synth.hpp"
#include "aeromap/terrain.hpp"

namespace aeromap {
namespace {

synth::SceneSpec scene_with(const std::string& type) {
  synth::SceneSpec s;
  s.origin_easting = 0;
  s.origin_northing = 0;
  s.heightfield.type = type;
  s.heightfield.slope_x = 0.3;
  s.heightfield.slope_y = -0.2;
  s.heightfield.amplitude = 8.0;
  s.heightfield.half_width = 12.0;
  s.heightfield.angle_deg = 30.0;
  s.heightfield.wavelength = 15.0;
  return s;
}

Eigen::Vector3d random_down_ray(std::mt19937& rng) {
  std::uniform_real_distribution<double> h(-0.8, 0.8);
  return Eigen::Vector3d(h(rng), h(rng), -1.0).normalized();
}

TEST(Raycast, FlatPlaneAnalytic) {
  const auto terrain = synth::make_terrain(scene_with("flat"));
  const auto t = terrain->raycast({5, 5, 100}, Eigen::Vector3d(0, 0, -1));
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(*t, 100.0);
  EXPECT_FALSE(terrain->raycast({5, 5, 100}, Eigen::Vector3d(0, 0, 1)));
  EXPECT_FALSE(terrain->raycast({5, 5, 100}, Eigen::Vector3d(1, 0, 0)));
}

// Oblique pixel ray on flat ground: depth along the ray is h / cos(angle).
TEST(Raycast, ObliqueFlatDepth) {
  const auto terrain = synth::make_terrain(scene_with("flat"));
  for (double deg : {5.0, 20.0, 44.0}) {
    const double a = deg * M_PI / 180.0;
    const auto t = terrain->raycast({0, 0, 100}, Eigen::Vector3d(std::sin(a), 0, -std::cos(a)));
    ASSERT_TRUE(t);
    EXPECT_NEAR(*t, 100.0 / std::cos(a), 1e-9);
  }
}

TEST(Raycast, RampMatchesPlaneIntersection) {
  const auto terrain = synth::make_terrain(scene_with("ramp"));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> p(20, 80);
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Vector3d o(p(rng), p(rng), 120);
    const Eigen::Vector3d d = random_down_ray(rng);
    // z = 0.3 x - 0.2 y inside the box
    const Eigen::Vector3d n(0.3, -0.2, -1.0);
    const double t_exact = -n.dot(o) / n.dot(d);
    const Eigen::Vector3d hit = o + t_exact * d;
    if (hit.x() < 0 || hit.x() > 100 || hit.y() < 0 || hit.y() > 100) continue;
    const auto t = terrain->raycast(o, d);
    ASSERT_TRUE(t);
    ASSERT_NEAR(*t, t_exact, 1e-7);
  }
}

// Generic oracle: a dense march finds the first sign change; the raycast must
// agree and land on the surface.
TEST(Raycast, FirstCrossingOnRidgeAndSmoothTerrain) {
  for (const char* type : {"ridge", "smooth-random"}) {
    const auto terrain = synth::make_terrain(scene_with(type));
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> p(0, 100);
    for (int i = 0; i < 150; ++i) {
      const Eigen::Vector3d o(p(rng), p(rng), 60);
      const Eigen::Vector3d d = random_down_ray(rng);
      const auto gap = [&](double t) {
        const Eigen::Vector3d q = o + t * d;
        return q.z() - terrain->height(q.x(), q.y());
      };
      double oracle = NAN;
      for (double t = 0; t < 200; t += 1e-3)
        if (gap(t) <= 0) {
          oracle = t;
          break;
        }
      const auto t = terrain->raycast(o, d);
      ASSERT_TRUE(t) << type;
      ASSERT_NEAR(*t, oracle, 2e-3) << type;
      ASSERT_NEAR(gap(*t), 0.0, 1e-6) << type;
    }
  }
}

TEST(Raycast, RidgeDepthJumpsAtCrest) {
  synth::SceneSpec s = scene_with("ridge");
  s.heightfield.angle_deg = 90.0;  // crest runs north-south through x = 50
  s.heightfield.half_width = 2.0;
  s.heightfield.amplitude = 10.0;
  const auto terrain = synth::make_terrain(s);
  EXPECT_NEAR(terrain->height(50, 10), 10.0, 1e-12);
  EXPECT_EQ(terrain->height(53, 10), 0.0);
  // Looking steeply west from east of the ridge, rays just above the crest
  // travel much further than rays just below it.
  const Eigen::Vector3d o(60, 50, 12);
  const auto below = terrain->raycast(o, Eigen::Vector3d(-10, 0, -2.05).normalized());
  const auto above = terrain->raycast(o, Eigen::Vector3d(-10, 0, -1.95).normalized());
  ASSERT_TRUE(below && above);
  EXPECT_GT(*above - *below, 1.0);
}

TEST(Terrain, BoundsAndSlopeAreHonoured) {
  for (const char* type : {"flat", "ramp", "ridge", "smooth-random"}) {
    const auto terrain = synth::make_terrain(scene_with(type));
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> p(-50, 150);
    for (int i = 0; i < 5000; ++i) {
      const double e = p(rng), n = p(rng);
      const double z = terrain->height(e, n);
      ASSERT_GE(z, terrain->min_height() - 1e-9) << type;
      ASSERT_LE(z, terrain->max_height() + 1e-9) << type;
      const double h = 1e-4;
      const double g = std::hypot(terrain->height(e + h, n) - z, terrain->height(e, n + h) - z) / h;
      ASSERT_LE(g, terrain->max_slope() * (1 + 1e-3) + 1e-6) << type;
    }
  }
}

}  // namespace
}  // namespace aeromap
