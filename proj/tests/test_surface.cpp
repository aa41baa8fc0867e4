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
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "aeromap/errors.hpp"
#include "aeromap/surface.hpp"
#include "support.hpp"

namespace aeromap::surface {
namespace {

using testing::test_camera;
using testing::utm_at;

PointCloud cloud_from(const std::vector<Eigen::Vector3d>& pts) {
  PointCloud c;
  for (const auto& p : pts) c.push_back({p, {0, 0, 0}});
  return c;
}

PointCloud lattice_cloud(double x0, double y0, int nx, int ny, double spacing,
                         const std::function<double(double, double)>& z) {
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nx; ++j) {
      const double x = x0 + j * spacing, y = y0 + i * spacing;
      pts.push_back({x, y, z(x, y)});
    }
  return cloud_from(pts);
}

TEST(PlanarDsm, FiftyMetreFootprint) {
  const LayeredGrid g = build_planar_dsm({0, 0, 50, 50});
  EXPECT_EQ(g.rows(), 50);
  EXPECT_EQ(g.cols(), 50);
  EXPECT_DOUBLE_EQ(g.gsd(), 1.0);
  EXPECT_EQ(g.layer(layer::kElevation).sum(), 0.0);
  EXPECT_EQ(g.count_valid(), 2500u);
}

TEST(PlanarDsm, TinyFootprintHasOneCell) {
  const LayeredGrid g = build_planar_dsm({3, 3, 3.5, 3.5});
  EXPECT_EQ(g.rows(), 1);
  EXPECT_EQ(g.cols(), 1);
  EXPECT_THROW(build_planar_dsm({3, 3, 3, 4}), DomainError);
}

TEST(EstimateGsd, LatticeAndPair) {
  const PointCloud c = lattice_cloud(0, 0, 40, 40, 0.5, [](double, double) { return 0.0; });
  std::vector<Eigen::Vector2d> xy;
  for (const auto& p : c) xy.push_back(p.position.head<2>());
  EXPECT_NEAR(estimate_gsd(KdTree2(xy)), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(estimate_gsd(KdTree2({{0, 0}, {3, 0}})), 3.0);
}

TEST(EstimateGsd, MatchesBruteForceOracle) {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(0, 100);
  for (int n : {2, 50, 777, 3000}) {
    std::vector<Eigen::Vector2d> pts;
    for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
    for (double fraction : {0.01, 0.1, 1.0}) {
      const std::size_t m = std::max<std::size_t>(1, std::size_t(std::ceil(fraction * n)));
      const std::size_t step = std::max<std::size_t>(1, n / m);
      double sum = 0;
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t i = k * step;
        double best = INFINITY;
        for (std::size_t j = 0; j < pts.size(); ++j)
          if (j != i) best = std::min(best, (pts[i] - pts[j]).norm());
        sum += best;
      }
      EXPECT_EQ(estimate_gsd(KdTree2(pts), fraction), sum / double(m));
    }
  }
}

TEST(EstimateGsd, Degenerate) {
  EXPECT_THROW(estimate_gsd(KdTree2({{1, 1}})), DomainError);
  EXPECT_THROW(estimate_gsd(KdTree2({{1, 1}, {1, 1}, {1, 1}})), DegenerateGeometryError);
}

TEST(InterpolateHeight, Basics) {
  const HeightSample one[] = {{4.0, 2.0}};
  EXPECT_EQ(interpolate_height(one), 4.0);
  const HeightSample sym[] = {{0.0, 1.5}, {10.0, 1.5}};
  EXPECT_DOUBLE_EQ(interpolate_height(sym), 5.0);
  const HeightSample hit[] = {{1.0, 1.0}, {9.0, 0.0}};
  EXPECT_EQ(interpolate_height(hit), 9.0);
  const HeightSample mixed[] = {{1.0, 1.0}, {2.0, 2.0}, {7.0, 0.5}};
  EXPECT_DOUBLE_EQ(interpolate_height(mixed), (1.0 / 1 + 2.0 / 2 + 7.0 / 0.5) / (1.0 + 0.5 + 2.0));
  EXPECT_THROW(interpolate_height(std::span<const HeightSample>{}), DomainError);
}

TEST(ElevatedDsm, FlatPlane) {
  const PointCloud c = lattice_cloud(0, 0, 60, 60, 0.5, [](double, double) { return 7.0; });
  const LayeredGrid g = build_elevated_dsm({0, 0, 30, 30}, c);
  EXPECT_NEAR(g.gsd(), 0.5, 1e-12);
  const auto& e = g.layer(layer::kElevation);
  for (int r = 0; r < g.rows(); ++r)
    for (int col = 0; col < g.cols(); ++col)
      if (g.valid(r, col)) ASSERT_NEAR(e(r, col), 7.0, 1e-9);
  EXPECT_GT(g.count_valid(), 3000u);
}

TEST(ElevatedDsm, LatticeRampErrorBoundedByGsdTimesSlope) {
  const double a = 0.4, b = -0.25;
  for (const double off : {0.0, 0.1, 0.25, 0.37}) {
    const PointCloud c = lattice_cloud(off, off, 80, 80, 0.5, [&](double x, double y) { return a * x + b * y; });
    const LayeredGrid g = build_elevated_dsm({0, 0, 40, 40}, c);
    const auto& e = g.layer(layer::kElevation);
    const double bound = g.gsd() * std::max(std::abs(a), std::abs(b));
    std::size_t checked = 0;
    for (int r = 0; r < g.rows(); ++r)
      for (int col = 0; col < g.cols(); ++col) {
        if (!g.valid(r, col)) continue;
        const Eigen::Vector2d p = g.cell_center(r, col);
        ASSERT_LT(std::abs(e(r, col) - (a * p.x() + b * p.y())), bound) << off << " " << p.transpose();
        ++checked;
      }
    EXPECT_GT(checked, 1000u);
  }
}

// IDW averages points within the search radius, so on a plane the error is
// at most radius * |gradient|.
TEST(ElevatedDsm, RampErrorBoundedByRadiusTimesSlope) {
  const double a = 0.4, b = -0.25;
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0, 40);
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 8000; ++i) {
    const double x = u(rng), y = u(rng);
    pts.push_back({x, y, a * x + b * y});
  }
  const LayeredGrid g = build_elevated_dsm({0, 0, 40, 40}, cloud_from(pts));
  const auto& e = g.layer(layer::kElevation);
  const double bound = ElevatedDsmConfig{}.radius_factor * g.gsd() * std::hypot(a, b);
  std::size_t checked = 0;
  for (int r = 0; r < g.rows(); ++r)
    for (int col = 0; col < g.cols(); ++col) {
      if (!g.valid(r, col)) continue;
      const Eigen::Vector2d p = g.cell_center(r, col);
      ASSERT_LT(std::abs(e(r, col) - (a * p.x() + b * p.y())), bound);
      ++checked;
    }
  EXPECT_GT(checked, 0u);
}

TEST(ElevatedDsm, HalfCoverageLeavesOtherHalfInvalid) {
  const PointCloud c = lattice_cloud(0.25, 0.25, 40, 80, 0.5, [](double x, double) { return x; });
  const LayeredGrid g = build_elevated_dsm({0, 0, 40, 40}, c);
  const double radius = 2.0 * g.gsd();
  for (int r = 0; r < g.rows(); ++r)
    for (int col = 0; col < g.cols(); ++col) {
      const double x = g.cell_center(r, col).x();
      if (x > 19.75 + radius) ASSERT_FALSE(g.valid(r, col));
      if (x < 19.75) ASSERT_TRUE(g.valid(r, col));
    }
}

// Property: IDW is a convex combination, so the output range lies inside the
// input range; serial and parallel runs agree exactly.
TEST(ElevatedDsm, OutputWithinCloudRangeAndDeterministic) {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> u(0, 25), z(-3, 12);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Eigen::Vector3d> pts;
    double lo = INFINITY, hi = -INFINITY;
    for (int i = 0; i < 1500; ++i) {
      pts.push_back({u(rng), u(rng), z(rng)});
      lo = std::min(lo, pts.back().z());
      hi = std::max(hi, pts.back().z());
    }
    const PointCloud c = cloud_from(pts);
    const LayeredGrid a = build_elevated_dsm({0, 0, 25, 25}, c, {}, Execution::Serial);
    const LayeredGrid b = build_elevated_dsm({0, 0, 25, 25}, c, {}, Execution::Parallel);
    ASSERT_TRUE(identical(a, b));
    const auto& e = a.layer(layer::kElevation);
    for (int r = 0; r < a.rows(); ++r)
      for (int col = 0; col < a.cols(); ++col)
        if (a.valid(r, col)) {
          ASSERT_GE(e(r, col), lo - 1e-12);
          ASSERT_LE(e(r, col), hi + 1e-12);
        }
  }
}

TEST(Footprint, NadirFootprintAtPlane) {
  Frame f;
  f.camera = test_camera();
  f.pose = default_pose(utm_at(100, 200, 48), 0);
  const RegionOfInterest r = frame_footprint(f, 0.0);
  // outer pixel edges: -0.5 and width-0.5
  EXPECT_NEAR(r.width(), 48.0 * 256.0 / 240.0, 1e-9);
  EXPECT_NEAR(r.height(), 48.0 * 192.0 / 240.0, 1e-9);
  const RegionOfInterest raised = frame_footprint(f, 24.0);
  EXPECT_NEAR(raised.width(), 24.0 * 256.0 / 240.0, 1e-9);
}

TEST(MedianElevation, OddAndEven) {
  EXPECT_EQ(median_elevation(cloud_from({{0, 0, 3}, {0, 0, 1}, {0, 0, 2}})), 2.0);
  EXPECT_EQ(median_elevation(cloud_from({{0, 0, 4}, {0, 0, 1}, {0, 0, 2}, {0, 0, 3}})), 2.5);
}

Frame frame_with(std::optional<PointCloud> dense, std::optional<PointCloud> sparse) {
  Frame f;
  f.camera = test_camera();
  f.pose = default_pose(utm_at(20, 20, 40), 0);
  f.dense_cloud = std::move(dense);
  f.sparse_cloud = std::move(sparse);
  return f;
}

Frame run_surface(Frame f, bool elevated = true) {
  SurfaceConfig cfg;
  cfg.elevated = elevated;
  SurfaceStage stage(cfg);
  std::vector<Frame> out;
  stage.process(std::move(f), [&](Frame&& g) { out.push_back(std::move(g)); });
  EXPECT_EQ(out.size(), 1u);
  return std::move(out.front());
}

TEST(SurfaceStage, CoversAllThreeFrameVariants) {
  const PointCloud dense = lattice_cloud(0, 0, 100, 100, 0.4, [](double, double) { return 2.0; });
  const PointCloud sparse = lattice_cloud(0, 0, 10, 10, 4.0, [](double, double) { return 5.0; });

  const Frame d = run_surface(frame_with(dense, sparse));
  EXPECT_NEAR(d.surface_gsd, 0.4, 1e-9);
  EXPECT_NEAR(d.surface->layer(layer::kElevation).maxCoeff(), 2.0, 1e-9);

  const Frame s = run_surface(frame_with(std::nullopt, sparse));
  EXPECT_NEAR(s.surface_gsd, 4.0, 1e-9);

  const Frame p = run_surface(frame_with(std::nullopt, std::nullopt));
  EXPECT_DOUBLE_EQ(p.surface_gsd, 1.0);
  EXPECT_EQ(p.surface->count_valid(), std::size_t(p.surface->rows()) * p.surface->cols());
  ASSERT_TRUE(p.footprint);

  const Frame forced = run_surface(frame_with(dense, sparse), false);
  EXPECT_DOUBLE_EQ(forced.surface_gsd, 1.0);
}

TEST(SurfaceStage, CoincidentCloudFallsBackToPlanar) {
  Diagnostics diag;
  SurfaceStage stage;
  stage.set_diagnostics(&diag);
  std::vector<Frame> out;
  stage.process(frame_with(cloud_from({{20, 20, 1}, {20, 20, 1}}), std::nullopt),
                [&](Frame&& g) { out.push_back(std::move(g)); });
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].surface_gsd, 1.0);
  EXPECT_EQ(diag.size(), 1u);
}

}  // namespace
}  // namespace aeromap::surface
