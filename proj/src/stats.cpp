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

#include "aeromap/stats.hpp"

#include <algorithm>

#include "aeromap/errors.hpp"

namespace aeromap {
namespace {

std::size_t count_in_window(const std::deque<double>& times, double lo, double hi) {
  const auto first = std::upper_bound(times.begin(), times.end(), lo);
  const auto last = std::upper_bound(times.begin(), times.end(), hi);
  return last > first ? std::size_t(last - first) : 0;
}

}  // namespace

StageStats::StageStats(std::string name, double window_seconds) : name_(std::move(name)), window_(window_seconds) {
  if (!(window_ > 0.0)) throw ConfigError("rate window must be positive");
}

RateSample StageStats::evaluate(double t) const {
  RateSample s;
  s.time = t;
  s.f_in = double(count_in_window(in_, t - window_, t)) / window_;
  s.f_out = double(count_in_window(out_, t - window_, t)) / window_;
  if (s.f_out > 0.0) s.delta_perf = s.f_in / s.f_out;
  return s;
}

RateSample StageStats::record_message(Direction direction, double t) {
  std::lock_guard lock(mutex_);
  auto& times = direction == Direction::In ? in_ : out_;
  if (!times.empty() && t < times.back()) throw DomainError("message timestamps must be monotone");
  times.push_back(t);
  (direction == Direction::In ? total_in_ : total_out_) += 1;
  // keep one extra window so that queries slightly in the past still work
  for (auto* q : {&in_, &out_})
    while (!q->empty() && q->front() <= t - 2.0 * window_) q->pop_front();
  const RateSample s = evaluate(t);
  history_.push_back(s);
  return s;
}

RateSample StageStats::sample_at(double t) const {
  std::lock_guard lock(mutex_);
  return evaluate(t);
}

std::vector<RateSample> StageStats::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

std::size_t StageStats::total(Direction direction) const {
  std::lock_guard lock(mutex_);
  return direction == Direction::In ? total_in_ : total_out_;
}

}  // namespace aeromap
