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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aeromap/frame.hpp"

namespace aeromap {

class Diagnostics;

/// "key: value" lines; blank lines and '#' comments are ignored.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

/// Reads fx, fy, cx, cy, width, height. Throws ConfigError when a field is
/// missing or the model is invalid.
CameraModel read_camera_file(const std::filesystem::path& path);

struct FrameMeta {
  std::uint64_t id = 0;
  double timestamp = 0.0;
  GeoPoint geotag;
  double heading = 0.0;
  bool stabilized = true;
};

/// Required: id, timestamp, latitude, longitude, altitude, heading.
/// Optional: stabilized (default 1). Throws IoError naming the first problem.
FrameMeta parse_sidecar(const std::filesystem::path& path);

/// Loads the image next to a parsed sidecar into a Frame.
Frame ingest_frame(const std::filesystem::path& image_path, const FrameMeta& meta, const CameraModel& camera);

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  /// Next frame in timestamp order, or nullopt at the end.
  virtual std::optional<Frame> next() = 0;
};

class VectorSource final : public FrameSource {
 public:
  explicit VectorSource(std::vector<Frame> frames) : frames_(std::move(frames)) {}
  std::optional<Frame> next() override;

 private:
  std::vector<Frame> frames_;
  std::size_t pos_ = 0;
};

/// Dataset directory with camera.txt and frames/<stem>.png + <stem>.txt.
/// Sidecars are parsed up front and sorted by timestamp; images are read on
/// demand. Unusable frames are skipped and reported.
class DirectorySource final : public FrameSource {
 public:
  DirectorySource(const std::filesystem::path& dir, Diagnostics* diagnostics = nullptr);

  std::optional<Frame> next() override;
  std::size_t size() const { return entries_.size(); }
  std::size_t skipped() const { return skipped_; }
  const CameraModel& camera() const { return camera_; }

 private:
  struct Entry {
    std::filesystem::path image;
    FrameMeta meta;
  };

  void skip(std::int64_t id, const std::string& message);

  CameraModel camera_;
  std::vector<Entry> entries_;
  std::size_t pos_ = 0;
  std::size_t skipped_ = 0;
  Diagnostics* diagnostics_;
};

}  // namespace aeromap
