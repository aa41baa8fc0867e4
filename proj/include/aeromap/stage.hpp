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

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "aeromap/frame.hpp"

namespace aeromap {

/// Thread-safe record of per-frame problems (skips, drops, stage errors).
class Diagnostics {
 public:
  struct Entry {
    std::string stage;
    std::int64_t frame_id = -1;
    std::string message;
  };

  void add(std::string stage, std::int64_t frame_id, std::string message);
  std::vector<Entry> entries() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<Entry> entries_;
};

/// One step of the pipeline. A stage receives frames in id order on a single
/// worker and hands results downstream through `emit`, also in id order.
class Stage {
 public:
  using Emit = std::function<void(Frame&&)>;

  virtual ~Stage() = default;
  virtual std::string name() const = 0;
  virtual void process(Frame frame, const Emit& emit) = 0;
  /// Input is exhausted; publish anything still held.
  virtual void flush(const Emit& emit) { (void)emit; }

  void set_diagnostics(Diagnostics* diagnostics) { diagnostics_ = diagnostics; }

 protected:
  void report(std::int64_t frame_id, const std::string& message) const;

 private:
  Diagnostics* diagnostics_ = nullptr;
};

}  // namespace aeromap
