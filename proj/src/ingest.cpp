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

#include "aeromap/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "aeromap/errors.hpp"
#include "aeromap/stage.hpp"

namespace aeromap {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size() || !std::isfinite(v))
    throw IoError("field '" + key + "' is not a number: '" + value + "'");
  return v;
}

class Fields {
 public:
  explicit Fields(const std::string& text) {
    for (auto& [k, v] : parse_key_values(text)) values_[k] = v;
  }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  double number(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw IoError("missing field '" + key + "'");
    return to_double(key, it->second);
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw IoError("expected 'key: value', got '" + t + "'");
    out.emplace_back(trim(t.substr(0, colon)), trim(t.substr(colon + 1)));
  }
  return out;
}

CameraModel read_camera_file(const std::filesystem::path& path) {
  try {
    const Fields f(read_text(path));
    CameraModel c;
    c.fx = f.number("fx");
    c.fy = f.number("fy");
    c.cx = f.number("cx");
    c.cy = f.number("cy");
    const double w = f.number("width");
    const double h = f.number("height");
    if (w != std::floor(w) || h != std::floor(h)) throw IoError("image size must be integral");
    c.width = int(w);
    c.height = int(h);
    c.validate();
    return c;
  } catch (const IoError& e) {
    throw ConfigError("camera file " + path.string() + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError("camera file " + path.string() + ": " + e.what());
  }
}

FrameMeta parse_sidecar(const std::filesystem::path& path) {
  const Fields f(read_text(path));
  FrameMeta m;
  const double id = f.number("id");
  if (id < 0 || id != std::floor(id)) throw IoError("id must be a non-negative integer");
  m.id = std::uint64_t(id);
  m.timestamp = f.number("timestamp");
  m.geotag.latitude = f.number("latitude");
  m.geotag.longitude = f.number("longitude");
  m.geotag.altitude = f.number("altitude");
  m.heading = f.number("heading");
  if (f.has("stabilized")) m.stabilized = f.number("stabilized") != 0.0;
  if (std::abs(m.geotag.latitude) > 90.0 || std::abs(m.geotag.longitude) > 180.0)
    throw IoError("geotag out of range");
  return m;
}

Frame ingest_frame(const std::filesystem::path& image_path, const FrameMeta& meta, const CameraModel& camera) {
  Frame f;
  f.id = meta.id;
  f.timestamp = meta.timestamp;
  f.geotag = meta.geotag;
  f.heading = meta.heading;
  f.stabilized = meta.stabilized;
  f.camera = camera;
  f.image = read_png(image_path);
  if (f.image.width() != camera.width || f.image.height() != camera.height)
    throw IoError("image size does not match the camera");
  return f;
}

std::optional<Frame> VectorSource::next() {
  if (pos_ >= frames_.size()) return std::nullopt;
  return std::move(frames_[pos_++]);
}

DirectorySource::DirectorySource(const std::filesystem::path& dir, Diagnostics* diagnostics)
    : diagnostics_(diagnostics) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("input is not a directory: " + dir.string());
  const fs::path frames = dir / "frames";
  if (!fs::is_directory(frames)) return;  // nothing to process

  std::vector<fs::path> sidecars;
  for (const auto& e : fs::directory_iterator(frames))
    if (e.is_regular_file() && e.path().extension() == ".txt") sidecars.push_back(e.path());
  if (sidecars.empty()) return;
  std::sort(sidecars.begin(), sidecars.end());

  camera_ = read_camera_file(dir / "camera.txt");
  for (const auto& s : sidecars) {
    fs::path image = s;
    image.replace_extension(".png");
    try {
      if (!fs::exists(image)) throw IoError("no image for sidecar");
      entries_.push_back({image, parse_sidecar(s)});
    } catch (const IoError& e) {
      skip(-1, s.filename().string() + ": " + e.what());
    }
  }
  std::stable_sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.meta.timestamp < b.meta.timestamp || (a.meta.timestamp == b.meta.timestamp && a.meta.id < b.meta.id);
  });
}

std::optional<Frame> DirectorySource::next() {
  while (pos_ < entries_.size()) {
    const Entry& e = entries_[pos_++];
    try {
      return ingest_frame(e.image, e.meta, camera_);
    } catch (const IoError& err) {
      skip(std::int64_t(e.meta.id), err.what());
    }
  }
  return std::nullopt;
}

void DirectorySource::skip(std::int64_t id, const std::string& message) {
  ++skipped_;
  if (diagnostics_) diagnostics_->add("ingest", id, message);
}

}  // namespace aeromap
