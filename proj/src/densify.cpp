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

#include "aeromap/densify.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "aeromap/errors.hpp"

namespace aeromap::densify {

DepthMap::DepthMap(int w, int h)
    : width(w), height(h), depths(std::size_t(w) * h, std::numeric_limits<double>::quiet_NaN()) {}

std::size_t DepthMap::count_valid() const {
  std::size_t n = 0;
  for (double d : depths) n += std::isfinite(d) && d > 0.0;
  return n;
}

PointCloud depth_to_cloud(const Frame& frame, const DepthMap& depth, int stride) {
  if (!frame.pose) throw DomainError("frame has no pose");
  if (stride < 1) throw DomainError("stride must be positive");
  if (depth.width != frame.camera.width || depth.height != frame.camera.height)
    throw DomainError("depth map does not match the camera");
  const bool colored = frame.image.width() == depth.width && frame.image.height() == depth.height;
  PointCloud cloud;
  for (int v = 0; v < depth.height; v += stride) {
    for (int u = 0; u < depth.width; u += stride) {
      const double d = depth.at(u, v);
      if (!std::isfinite(d) || !(d > 0.0)) continue;
      CloudPoint p;
      p.position = backproject(frame.camera, *frame.pose, {double(u), double(v)}, d);
      if (colored) p.color = frame.image.rgb(u, v);
      cloud.push_back(p);
    }
  }
  return cloud;
}

std::optional<DepthMap> GroundTruthDensifier::densify(std::span<const Frame* const> window, std::size_t reference) {
  const Frame& frame = *window[reference];
  if (!frame.pose) return std::nullopt;
  const CameraModel& cam = frame.camera;
  DepthMap depth(cam.width, cam.height);
  const Eigen::Vector3d origin = frame.pose->position();
  const bool parallel = exec_ == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      // pixel_ray is scaled so that its parameter equals optical depth
      const Eigen::Vector3d ray = pixel_ray(cam, *frame.pose, {double(u), double(v)});
      if (auto t = terrain_->raycast(origin, ray)) depth.at(u, v) = *t;
    }
  }
  return depth;
}

namespace {

Eigen::ArrayXXf to_gray(const Image& image) {
  Eigen::ArrayXXf gray(image.height(), image.width());
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      const auto* p = image.pixel(x, y);
      gray(y, x) = 0.299f * p[0] + 0.587f * p[1] + 0.114f * p[2];
    }
  return gray;
}

bool sample(const Eigen::ArrayXXf& g, double x, double y, float& out) {
  const int cols = int(g.cols());
  const int rows = int(g.rows());
  if (cols < 2 || rows < 2) return false;
  if (!(x >= 0.0 && y >= 0.0 && x <= cols - 1.0 && y <= rows - 1.0)) return false;
  const int x0 = std::min(int(x), cols - 2);
  const int y0 = std::min(int(y), rows - 2);
  const float fx = float(x - x0);
  const float fy = float(y - y0);
  out = (1 - fy) * ((1 - fx) * g(y0, x0) + fx * g(y0, x0 + 1)) +
        fy * ((1 - fx) * g(y0 + 1, x0) + fx * g(y0 + 1, x0 + 1));
  return true;
}

}  // namespace

BlockMatchDensifier::BlockMatchDensifier(BlockMatchConfig config, Execution exec) : config_(config), exec_(exec) {
  if (config_.frames < 2) throw ConfigError("block matching needs at least two frames");
  if (config_.planes < 2 || config_.half_window < 0 || config_.step < 1)
    throw ConfigError("invalid block matching parameters");
  if (!(config_.min_depth_ratio > 0.0) || !(config_.max_depth_ratio > config_.min_depth_ratio))
    throw ConfigError("invalid block matching depth range");
}

std::optional<DepthMap> BlockMatchDensifier::densify(std::span<const Frame* const> window, std::size_t reference) {
  const Frame& ref = *window[reference];
  if (!ref.pose || ref.image.empty()) return std::nullopt;
  const double height = ref.pose->position().z();
  if (!(height > 0.0)) return std::nullopt;

  const Eigen::ArrayXXf ref_gray = to_gray(ref.image);
  const Eigen::Matrix3d ref_rot = optical_to_world(*ref.pose);
  const Eigen::Matrix3d ref_kinv = ref.camera.K().inverse();

  struct View {
    Eigen::ArrayXXf gray;
    std::vector<Eigen::Matrix3d> homographies;
  };
  std::vector<View> views;
  std::vector<double> plane_depths(config_.planes);
  const double inv_near = 1.0 / (config_.min_depth_ratio * height);
  const double inv_far = 1.0 / (config_.max_depth_ratio * height);
  for (int k = 0; k < config_.planes; ++k)
    plane_depths[k] = 1.0 / (inv_far + (inv_near - inv_far) * k / (config_.planes - 1));

  for (std::size_t i = 0; i < window.size(); ++i) {
    if (i == reference || !window[i]->pose || window[i]->image.empty()) continue;
    const Frame& other = *window[i];
    View view;
    view.gray = to_gray(other.image);
    const Eigen::Matrix3d to_other = other.camera.K() * optical_to_world(*other.pose).transpose();
    const Eigen::Vector3d baseline = ref.pose->position() - other.pose->position();
    for (double d : plane_depths) {
      Eigen::Matrix3d h = d * ref_rot * ref_kinv;
      h.col(2) += baseline;
      view.homographies.push_back(to_other * h);
    }
    views.push_back(std::move(view));
  }
  if (views.empty()) return std::nullopt;

  DepthMap depth(ref.camera.width, ref.camera.height);
  const int r = config_.half_window;
  const int w = ref.camera.width;
  const int hgt = ref.camera.height;
  const double patch = double((2 * r + 1) * (2 * r + 1));
  const bool parallel = exec_ == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 2) if (parallel)
  for (int v = r; v < hgt - r; v += config_.step) {
    for (int u = r; u < w - r; u += config_.step) {
      double best = std::numeric_limits<double>::infinity();
      int best_plane = -1;
      for (int k = 0; k < config_.planes; ++k) {
        double cost = 0.0;
        int seen = 0;
        for (const View& view : views) {
          const Eigen::Matrix3d& hom = view.homographies[k];
          double sad = 0.0;
          bool inside = true;
          for (int dv = -r; dv <= r && inside; ++dv) {
            for (int du = -r; du <= r; ++du) {
              const Eigen::Vector3d q = hom * Eigen::Vector3d(u + du, v + dv, 1.0);
              float value = 0.0f;
              if (!(q.z() > 0.0) || !sample(view.gray, q.x() / q.z(), q.y() / q.z(), value)) {
                inside = false;
                break;
              }
              sad += std::abs(value - ref_gray(v + dv, u + du));
            }
          }
          if (!inside) continue;
          cost += sad / patch;
          ++seen;
        }
        if (seen == 0) continue;
        cost /= seen;
        if (cost < best) {
          best = cost;
          best_plane = k;
        }
      }
      if (best_plane >= 0 && best <= config_.max_cost) depth.at(u, v) = plane_depths[best_plane];
    }
  }
  return depth;
}

DensifyStage::DensifyStage(std::unique_ptr<Densifier> densifier, DensifyConfig config)
    : densifier_(std::move(densifier)), config_(config) {
  if (config_.stride < 1) throw ConfigError("depth stride must be positive");
  if (densifier_ && densifier_->required_frame_count() < 1) throw ConfigError("densifier needs at least one frame");
}

void DensifyStage::process(Frame frame, const Emit& emit) {
  if (!frame.pose) {
    report(std::int64_t(frame.id), "frame without pose dropped");
    return;
  }
  if (frame.pose->source != PoseSource::Visual || !densifier_) {
    flush(emit);
    emit(std::move(frame));
    return;
  }

  window_.push_back(std::move(frame));
  const std::size_t k = densifier_->required_frame_count();
  if (window_.size() < k) return;

  const std::size_t center = k / 2;
  publish_pending(center, emit);

  std::vector<const Frame*> view;
  for (const Frame& f : window_) view.push_back(&f);
  Frame out = k == 1 ? std::move(window_[center]) : window_[center];
  try {
    if (auto depth = densifier_->densify(view, center)) {
      out.dense_cloud = depth_to_cloud(out, *depth, config_.stride);
      out.sparse_cloud.reset();
    } else {
      report(std::int64_t(out.id), "densifier produced no depth; sparse cloud only");
    }
  } catch (const std::exception& e) {
    report(std::int64_t(out.id), std::string("densifier failed: ") + e.what());
  }
  emit(std::move(out));
  published_ = center + 1;

  window_.pop_front();
  --published_;
}

void DensifyStage::flush(const Emit& emit) {
  publish_pending(window_.size(), emit);
  window_.clear();
  published_ = 0;
}

void DensifyStage::publish_pending(std::size_t until, const Emit& emit) {
  for (; published_ < until; ++published_) {
    Frame copy = window_[published_];
    emit(std::move(copy));
  }
}

}  // namespace aeromap::densify
