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


#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aeromap/densify.hpp"
#include "aeromap/errors.hpp"
#include "aeromap/synth.hpp"
#include "support.hpp"

namespace aeromap::densify {
namespace {

using testing::test_camera;
using testing::utm_at;

Frame posed_frame(std::uint64_t id, const Pose& pose) {
  Frame f;
  f.id = id;
  f.camera = test_camera();
  f.image = Image(f.camera.width, f.camera.height);
  for (int y = 0; y < f.image.height(); ++y)
    for (int x = 0; x < f.image.width(); ++x)
      f.image.set(x, y, {std::uint8_t(x), std::uint8_t(y), std::uint8_t(id)});
  f.pose = pose;
  return f;
}

Pose visual_pose(double e, double n, double alt, double heading = 0.0) {
  Pose p = default_pose(utm_at(e, n, alt), heading);
  p.source = PoseSource::Visual;
  return p;
}

std::shared_ptr<Terrain> terrain_of(const std::string& type) {
  synth::SceneSpec s;
  s.origin_easting = 0;
  s.origin_northing = 0;
  s.heightfield.type = type;
  s.heightfield.amplitude = 6.0;
  s.heightfield.half_width = 10.0;
  return synth::make_terrain(s);
}

DepthMap truth_depth(const Frame& f, const std::string& type, Execution exec = Execution::Parallel) {
  GroundTruthDensifier d(terrain_of(type), exec);
  const Frame* w[] = {&f};
  auto depth = d.densify(w, 0);
  EXPECT_TRUE(depth);
  return *depth;
}

TEST(DepthToCloud, AllNoDataGivesEmptyCloud) {
  const Frame f = posed_frame(0, visual_pose(0, 0, 100));
  EXPECT_TRUE(depth_to_cloud(f, DepthMap(f.camera.width, f.camera.height), 1).empty());
}

TEST(DepthToCloud, ConstantDepthNadirLandsOnGround) {
  const Frame f = posed_frame(0, visual_pose(10, 20, 100, 33));
  DepthMap d(f.camera.width, f.camera.height);
  std::fill(d.depths.begin(), d.depths.end(), 100.0);
  const PointCloud cloud = depth_to_cloud(f, d, 1);
  ASSERT_EQ(cloud.size(), std::size_t(f.camera.width) * f.camera.height);
  for (const auto& p : cloud) ASSERT_NEAR(p.position.z(), 0.0, 1e-9);
}

TEST(DepthToCloud, SizeMatchesValidPixelsOnStrideLattice) {
  const Frame f = posed_frame(0, visual_pose(0, 0, 50));
  std::mt19937 rng(3);
  std::bernoulli_distribution keep(0.4);
  DepthMap d(f.camera.width, f.camera.height);
  for (auto& v : d.depths)
    if (keep(rng)) v = 50.0;
  d.at(0, 0) = -1.0;
  d.at(2, 0) = INFINITY;
  for (int stride : {1, 2, 3, 7}) {
    std::size_t expected = 0;
    for (int v = 0; v < d.height; v += stride)
      for (int u = 0; u < d.width; u += stride) expected += std::isfinite(d.at(u, v)) && d.at(u, v) > 0;
    EXPECT_EQ(depth_to_cloud(f, d, stride).size(), expected);
  }
}

TEST(DepthToCloud, ColorsComeFromSourcePixel) {
  const Frame f = posed_frame(9, visual_pose(0, 0, 50));
  DepthMap d(f.camera.width, f.camera.height);
  d.at(17, 33) = 50.0;
  const PointCloud cloud = depth_to_cloud(f, d, 1);
  ASSERT_EQ(cloud.size(), 1u);
  EXPECT_EQ(cloud[0].color, (std::array<std::uint8_t, 3>{17, 33, 9}));
}

TEST(DepthToCloud, RejectsMismatchedDepth) {
  const Frame f = posed_frame(0, visual_pose(0, 0, 50));
  EXPECT_THROW(depth_to_cloud(f, DepthMap(10, 10), 1), DomainError);
  EXPECT_THROW(depth_to_cloud(f, DepthMap(f.camera.width, f.camera.height), 0), DomainError);
}

TEST(GroundTruth, FlatNadirDepthIsAltitude) {
  const Frame f = posed_frame(0, visual_pose(50, 50, 100));
  const DepthMap d = truth_depth(f, "flat");
  EXPECT_EQ(d.count_valid(), d.depths.size());
  EXPECT_NEAR(d.at(127, 95), 100.0, 1e-9);
  // range along an oblique pixel ray is altitude / cos(ray angle)
  for (auto [u, v] : {std::pair{0, 0}, std::pair{255, 191}, std::pair{40, 150}}) {
    const Eigen::Vector3d ray = pixel_ray(f.camera, *f.pose, {double(u), double(v)});
    const double cos_angle = -ray.normalized().z();
    EXPECT_NEAR(d.at(u, v) * ray.norm(), 100.0 / cos_angle, 1e-8);
  }
}

TEST(GroundTruth, CloudLiesOnHeightfield) {
  const auto terrain = terrain_of("ridge");
  std::mt19937 rng(5);
  const Frame f = posed_frame(0, [&] {
    Pose p = visual_pose(50, 50, 40, 20);
    p.rotation = p.rotation * Eigen::AngleAxisd(0.15, Eigen::Vector3d::UnitX()).toRotationMatrix();
    return p;
  }());
  const DepthMap d = truth_depth(f, "ridge");
  const PointCloud cloud = depth_to_cloud(f, d, 2);
  ASSERT_FALSE(cloud.empty());
  for (const auto& p : cloud) ASSERT_NEAR(p.position.z(), terrain->height(p.position.x(), p.position.y()), 1e-6);
}

// Property: dense points re-project within 0.5 px of their source pixel.
TEST(GroundTruth, PointsReprojectOntoSourcePixels) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> pos(30, 70), tilt(-0.2, 0.2), h(0, 360);
  for (int trial = 0; trial < 5; ++trial) {
    Pose pose = visual_pose(pos(rng), pos(rng), 35, h(rng));
    pose.rotation = pose.rotation * Eigen::AngleAxisd(tilt(rng), Eigen::Vector3d::UnitX()).toRotationMatrix() *
                    Eigen::AngleAxisd(tilt(rng), Eigen::Vector3d::UnitY()).toRotationMatrix();
    const Frame f = posed_frame(0, pose);
    const DepthMap d = truth_depth(f, "smooth-random");
    for (int v = 0; v < d.height; v += 5)
      for (int u = 0; u < d.width; u += 5) {
        if (!std::isfinite(d.at(u, v))) continue;
        const Eigen::Vector3d w = backproject(f.camera, pose, {double(u), double(v)}, d.at(u, v));
        const Projection p = project(f.camera, pose, w);
        ASSERT_LT((p.pixel - Eigen::Vector2d(u, v)).norm(), 0.5);
      }
  }
}

TEST(GroundTruth, SerialMatchesParallel) {
  const Frame f = posed_frame(0, visual_pose(50, 50, 30, 45));
  const DepthMap a = truth_depth(f, "smooth-random", Execution::Serial);
  const DepthMap b = truth_depth(f, "smooth-random", Execution::Parallel);
  ASSERT_EQ(a.depths.size(), b.depths.size());
  for (std::size_t i = 0; i < a.depths.size(); ++i)
    ASSERT_TRUE(a.depths[i] == b.depths[i] || (std::isnan(a.depths[i]) && std::isnan(b.depths[i])));
}

/// Counts calls; fails on request.
class FakeDensifier final : public Densifier {
 public:
  FakeDensifier(std::size_t k, std::vector<std::uint64_t>* references, bool fail = false)
      : k_(k), references_(references), fail_(fail) {}
  std::size_t required_frame_count() const override { return k_; }
  std::optional<DepthMap> densify(std::span<const Frame* const> window, std::size_t reference) override {
    EXPECT_EQ(window.size(), k_);
    for (std::size_t i = 1; i < window.size(); ++i) EXPECT_LT(window[i - 1]->id, window[i]->id);
    references_->push_back(window[reference]->id);
    if (fail_) throw std::runtime_error("boom");
    DepthMap d(window[reference]->camera.width, window[reference]->camera.height);
    d.at(0, 0) = window[reference]->pose->position().z();
    return d;
  }

 private:
  std::size_t k_;
  std::vector<std::uint64_t>* references_;
  bool fail_;
};

Frame with_sparse(Frame f) {
  f.sparse_cloud = PointCloud{CloudPoint{}};
  return f;
}

TEST(DensifyStage, GnssDefaultFramePassesThroughUnchanged) {
  std::vector<std::uint64_t> refs;
  DensifyStage stage(std::make_unique<FakeDensifier>(1, &refs));
  Frame f = posed_frame(3, default_pose(utm_at(1, 2, 30), 10));
  const Frame copy = f;
  std::vector<Frame> out;
  stage.process(std::move(f), [&](Frame&& g) { out.push_back(std::move(g)); });
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].image, copy.image);
  EXPECT_EQ(out[0].pose->rotation, copy.pose->rotation);
  EXPECT_EQ(out[0].pose->source, PoseSource::GnssDefault);
  EXPECT_FALSE(out[0].dense_cloud);
  EXPECT_TRUE(refs.empty());
}

TEST(DensifyStage, UnderfullWindowPublishesNothing) {
  std::vector<std::uint64_t> refs;
  DensifyStage stage(std::make_unique<FakeDensifier>(5, &refs));
  std::vector<Frame> out;
  for (std::uint64_t i = 0; i < 4; ++i)
    stage.process(posed_frame(i, visual_pose(i, 0, 30)), [&](Frame&& g) { out.push_back(std::move(g)); });
  EXPECT_TRUE(out.empty());
  EXPECT_TRUE(refs.empty());
}

TEST(DensifyStage, SlidingWindowPublishesEveryFrameOnceInOrder) {
  std::vector<std::uint64_t> refs;
  DensifyStage stage(std::make_unique<FakeDensifier>(3, &refs), DensifyConfig{1});
  std::vector<Frame> out;
  const auto emit = [&](Frame&& g) { out.push_back(std::move(g)); };
  for (std::uint64_t i = 0; i < 10; ++i) stage.process(with_sparse(posed_frame(i, visual_pose(i, 0, 30))), emit);
  // a GNSS frame cuts the window
  stage.process(posed_frame(10, default_pose(utm_at(10, 0, 30), 0)), emit);
  for (std::uint64_t i = 11; i < 13; ++i) stage.process(with_sparse(posed_frame(i, visual_pose(i, 0, 30))), emit);
  stage.flush(emit);
  ASSERT_EQ(out.size(), 13u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].id, i);
  EXPECT_EQ(refs, (std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8}));
  for (const auto& f : out) {
    const bool dense = f.id >= 1 && f.id <= 8;
    EXPECT_EQ(f.dense_cloud.has_value(), dense) << f.id;
    if (dense) {
      EXPECT_FALSE(f.sparse_cloud) << f.id;
      EXPECT_EQ(f.dense_cloud->size(), 1u);
    }
  }
}

TEST(DensifyStage, FailurePublishesSparseOnlyWithDiagnostic) {
  std::vector<std::uint64_t> refs;
  Diagnostics diag;
  DensifyStage stage(std::make_unique<FakeDensifier>(1, &refs, true));
  stage.set_diagnostics(&diag);
  std::vector<Frame> out;
  stage.process(with_sparse(posed_frame(0, visual_pose(0, 0, 30))), [&](Frame&& g) { out.push_back(std::move(g)); });
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].dense_cloud);
  EXPECT_TRUE(out[0].sparse_cloud);
  EXPECT_EQ(diag.size(), 1u);
}

TEST(DensifyStage, NoDensifierPassesEverything) {
  DensifyStage stage(nullptr);
  std::vector<Frame> out;
  for (std::uint64_t i = 0; i < 4; ++i)
    stage.process(with_sparse(posed_frame(i, visual_pose(i, 0, 30))), [&](Frame&& g) { out.push_back(std::move(g)); });
  ASSERT_EQ(out.size(), 4u);
  for (const auto& f : out) EXPECT_TRUE(f.sparse_cloud && !f.dense_cloud);
}

TEST(BlockMatch, RecoversFlatGroundDepthRoughly) {
  synth::SceneSpec s = testing::small_scene();
  s.texture.type = "noise";
  s.texture.cell = 1.0;
  s.flight.frame_rate = 1.0;  // 5 m baseline at 40 m
  const auto frames = synth::synthesize_frames(s);
  ASSERT_GE(frames.size(), 3u);
  std::vector<Frame> window(frames.begin(), frames.begin() + 3);
  for (auto& f : window) {
    f.pose = default_pose(wgs84_to_utm(f.geotag, s.zone), f.heading);
    f.pose->source = PoseSource::Visual;
  }
  const Frame* view[] = {&window[0], &window[1], &window[2]};
  BlockMatchDensifier bm;
  const auto depth = bm.densify(view, 1);
  ASSERT_TRUE(depth);
  std::vector<double> valid;
  for (double d : depth->depths)
    if (std::isfinite(d)) valid.push_back(d);
  ASSERT_GT(valid.size(), depth->depths.size() / 50);
  std::nth_element(valid.begin(), valid.begin() + valid.size() / 2, valid.end());
  EXPECT_NEAR(valid[valid.size() / 2], 40.0, 4.0);
}

TEST(BlockMatch, RejectsBadConfig) {
  BlockMatchConfig c;
  c.frames = 1;
  EXPECT_THROW(BlockMatchDensifier{c}, ConfigError);
  c = {};
  c.max_depth_ratio = 0.5;
  EXPECT_THROW(BlockMatchDensifier{c}, ConfigError);
}

}  // namespace
}  // namespace aeromap::densify
