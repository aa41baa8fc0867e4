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

#include <cstddef>
#include <deque>
#include <limits>
#include <mutex>
#include <string>
#include <vector>

namespace aeromap {

enum class Direction { In, Out };

struct RateSample {
  double time = 0.0;
  double f_in = 0.0;   // Hz
  double f_out = 0.0;  // Hz
  double delta_perf = std::numeric_limits<double>::quiet_NaN();  // f_in / f_out, NaN while f_out = 0
};

/// Message rates of one stage over a sliding window: f = count / window for
/// the messages in (t - window, t]. Thread-safe.
class StageStats {
 public:
  explicit StageStats(std::string name, double window_seconds = 10.0);

  const std::string& name() const { return name_; }
  double window() const { return window_; }

  /// Adds a message at time t (seconds, monotone per direction), appends the
  /// resulting sample to the history and returns it.
  RateSample record_message(Direction direction, double t);
  RateSample sample_at(double t) const;

  std::vector<RateSample> history() const;
  std::size_t total(Direction direction) const;

 private:
  RateSample evaluate(double t) const;

  std::string name_;
  double window_;
  mutable std::mutex mutex_;
  std::deque<double> in_;
  std::deque<double> out_;
  std::size_t total_in_ = 0;
  std::size_t total_out_ = 0;
  std::vector<RateSample> history_;
};

}  // namespace aeromap
