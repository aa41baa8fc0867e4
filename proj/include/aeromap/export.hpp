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

#include <filesystem>
#include <string>
#include <vector>

#include "aeromap/grid.hpp"

namespace aeromap {

/// Writes ortho.png/.pgw, elevation.asc, elevation_variance.asc and
/// num_observations.png/.pgw for a fused map, plus dense.ply on request.
/// Returns the written paths.
std::vector<std::filesystem::path> export_snapshot(const LayeredGrid& map, const std::filesystem::path& dir,
                                                   bool with_cloud = false);

}  // namespace aeromap
