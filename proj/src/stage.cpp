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

#include "aeromap/stage.hpp"

#include <spdlog/spdlog.h>

namespace aeromap {

void Diagnostics::add(std::string stage, std::int64_t frame_id, std::string message) {
  spdlog::warn("[{}] frame {}: {}", stage, frame_id, message);
  std::lock_guard lock(mutex_);
  entries_.push_back({std::move(stage), frame_id, std::move(message)});
}

std::vector<Diagnostics::Entry> Diagnostics::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t Diagnostics::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void Stage::report(std::int64_t frame_id, const std::string& message) const {
  if (diagnostics_)
    diagnostics_->add(name(), frame_id, message);
  else
    spdlog::debug("[{}] frame {}: {}", name(), frame_id, message);
}

}  // namespace aeromap
