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

#include "aeromap/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace aeromap {
namespace {

using Candidate = std::pair<double, std::size_t>;  // squared distance, index

double squared_distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  return dx * dx + dy * dy;
}

// Keeps the `capacity` best candidates in a max-heap.
class BoundedSet {
 public:
  BoundedSet(std::size_t capacity, double max_squared, std::optional<std::size_t> exclude)
      : capacity_(capacity), max_squared_(max_squared), exclude_(exclude) {}

  double bound() const {
    if (capacity_ == 0) return -1.0;
    if (heap_.size() < capacity_) return max_squared_;
    return std::min(max_squared_, heap_.front().first);
  }

  void offer(std::size_t index, double d2) {
    if (capacity_ == 0 || (exclude_ && *exclude_ == index) || d2 > max_squared_) return;
    const Candidate c{d2, index};
    if (heap_.size() < capacity_) {
      heap_.push_back(c);
      std::push_heap(heap_.begin(), heap_.end());
    } else if (c < heap_.front()) {
      std::pop_heap(heap_.begin(), heap_.end());
      heap_.back() = c;
      std::push_heap(heap_.begin(), heap_.end());
    }
  }

  std::vector<KdTree2::Neighbor> sorted() {
    std::sort(heap_.begin(), heap_.end());
    std::vector<KdTree2::Neighbor> out;
    out.reserve(heap_.size());
    for (const auto& [d2, index] : heap_) out.push_back({index, std::sqrt(d2)});
    return out;
  }

 private:
  std::size_t capacity_;
  double max_squared_;
  std::optional<std::size_t> exclude_;
  std::vector<Candidate> heap_;
};

}  // namespace

KdTree2::KdTree2(std::vector<Eigen::Vector2d> points) : points_(std::move(points)) {
  nodes_.resize(points_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].point = i;
  build(0, nodes_.size());
}

void KdTree2::build(std::size_t lo, std::size_t hi) {
  if (hi <= lo) return;
  Eigen::Vector2d mn = points_[nodes_[lo].point];
  Eigen::Vector2d mx = mn;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    mn = mn.cwiseMin(points_[nodes_[i].point]);
    mx = mx.cwiseMax(points_[nodes_[i].point]);
  }
  const int axis = (mx.x() - mn.x()) >= (mx.y() - mn.y()) ? 0 : 1;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(nodes_.begin() + lo, nodes_.begin() + mid, nodes_.begin() + hi,
                   [&](const Node& a, const Node& b) {
                     const double ca = points_[a.point][axis];
                     const double cb = points_[b.point][axis];
                     return ca < cb || (ca == cb && a.point < b.point);
                   });
  nodes_[mid].axis = axis;
  build(lo, mid);
  build(mid + 1, hi);
}

template <typename Visitor>
void KdTree2::search(std::size_t lo, std::size_t hi, const Eigen::Vector2d& q, Visitor& visitor) const {
  if (hi <= lo) return;
  const std::size_t mid = lo + (hi - lo) / 2;
  const Node& node = nodes_[mid];
  const Eigen::Vector2d& p = points_[node.point];
  visitor.offer(node.point, squared_distance(q, p));
  const double diff = q[node.axis] - p[node.axis];
  if (diff < 0.0) {
    search(lo, mid, q, visitor);
    if (diff * diff <= visitor.bound()) search(mid + 1, hi, q, visitor);
  } else {
    search(mid + 1, hi, q, visitor);
    if (diff * diff <= visitor.bound()) search(lo, mid, q, visitor);
  }
}

std::optional<KdTree2::Neighbor> KdTree2::nearest(const Eigen::Vector2d& query,
                                                  std::optional<std::size_t> exclude) const {
  auto result = knn(query, 1, exclude);
  if (result.empty()) return std::nullopt;
  return result.front();
}

std::vector<KdTree2::Neighbor> KdTree2::knn(const Eigen::Vector2d& query, std::size_t k,
                                            std::optional<std::size_t> exclude) const {
  BoundedSet set(k, std::numeric_limits<double>::infinity(), exclude);
  search(0, nodes_.size(), query, set);
  return set.sorted();
}

std::vector<KdTree2::Neighbor> KdTree2::radius_search(const Eigen::Vector2d& query, double radius,
                                                      std::size_t max_results) const {
  if (!(radius >= 0.0)) return {};
  BoundedSet set(std::min(max_results, points_.size()), radius * radius, std::nullopt);
  search(0, nodes_.size(), query, set);
  return set.sorted();
}

}  // namespace aeromap
