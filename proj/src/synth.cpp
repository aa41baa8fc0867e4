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

#include "aeromap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Geometry>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "aeromap/errors.hpp"
#include "aeromap/grid_io.hpp"

namespace aeromap::synth {
namespace {

using nlohmann::json;
constexpr double kDegToRad = M_PI / 180.0;

class FlatTerrain final : public Terrain {
 public:
  explicit FlatTerrain(double z) : z_(z) {}
  double height(double, double) const override { return z_; }
  double min_height() const override { return z_; }
  double max_height() const override { return z_; }
  double max_slope() const override { return 0.0; }

 private:
  double z_;
};

// Plane clipped to the scene box so that its range stays bounded.
class RampTerrain final : public Terrain {
 public:
  RampTerrain(const SceneSpec& s, double margin)
      : e0_(s.origin_easting),
        n0_(s.origin_northing),
        lo_(-margin, -margin),
        hi_(s.extent_x + margin, s.extent_y + margin),
        base_(s.heightfield.elevation),
        sx_(s.heightfield.slope_x),
        sy_(s.heightfield.slope_y) {}

  double height(double e, double n) const override {
    const double x = std::clamp(e - e0_, lo_.x(), hi_.x());
    const double y = std::clamp(n - n0_, lo_.y(), hi_.y());
    return base_ + sx_ * x + sy_ * y;
  }
  double min_height() const override { return extreme(false); }
  double max_height() const override { return extreme(true); }
  double max_slope() const override { return std::hypot(sx_, sy_); }

 private:
  double extreme(bool high) const {
    double best = high ? -INFINITY : INFINITY;
    for (double x : {lo_.x(), hi_.x()})
      for (double y : {lo_.y(), hi_.y()}) {
        const double z = base_ + sx_ * x + sy_ * y;
        best = high ? std::max(best, z) : std::min(best, z);
      }
    return best;
  }

  double e0_, n0_;
  Eigen::Vector2d lo_, hi_;
  double base_, sx_, sy_;
};

class RidgeTerrain final : public Terrain {
 public:
  explicit RidgeTerrain(const SceneSpec& s)
      : center_(s.origin_easting + 0.5 * s.extent_x, s.origin_northing + 0.5 * s.extent_y),
        normal_(-std::sin(s.heightfield.angle_deg * kDegToRad), std::cos(s.heightfield.angle_deg * kDegToRad)),
        base_(s.heightfield.elevation),
        amplitude_(s.heightfield.amplitude),
        half_width_(s.heightfield.half_width) {}

  double height(double e, double n) const override {
    const double d = std::abs(normal_.dot(Eigen::Vector2d(e, n) - center_));
    return base_ + amplitude_ * std::max(0.0, 1.0 - d / half_width_);
  }
  double min_height() const override { return base_ + std::min(0.0, amplitude_); }
  double max_height() const override { return base_ + std::max(0.0, amplitude_); }
  double max_slope() const override { return std::abs(amplitude_) / half_width_; }

 private:
  Eigen::Vector2d center_, normal_;
  double base_, amplitude_, half_width_;
};

class SmoothRandomTerrain final : public Terrain {
 public:
  explicit SmoothRandomTerrain(const SceneSpec& s) : e0_(s.origin_easting), n0_(s.origin_northing) {
    const auto& h = s.heightfield;
    base_ = h.elevation;
    amplitude_ = h.amplitude;
    std::mt19937 rng(h.seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> length(h.wavelength, 2.0 * h.wavelength);
    const int k = std::max(1, h.components);
    for (int i = 0; i < k; ++i) {
      const double a = angle(rng);
      const double l = length(rng);
      waves_.push_back({2.0 * M_PI / l * Eigen::Vector2d(std::cos(a), std::sin(a)), angle(rng)});
      slope_ += 2.0 * M_PI / l;
    }
    slope_ *= std::abs(amplitude_) / k;
  }

  double height(double e, double n) const override {
    const Eigen::Vector2d p(e - e0_, n - n0_);
    double sum = 0.0;
    for (const auto& w : waves_) sum += std::sin(w.k.dot(p) + w.phase);
    return base_ + amplitude_ * sum / double(waves_.size());
  }
  double min_height() const override { return base_ - std::abs(amplitude_); }
  double max_height() const override { return base_ + std::abs(amplitude_); }
  double max_slope() const override { return slope_; }

 private:
  struct Wave {
    Eigen::Vector2d k;
    double phase;
  };
  double e0_, n0_;
  double base_ = 0.0, amplitude_ = 0.0, slope_ = 0.0;
  std::vector<Wave> waves_;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double lattice_value(std::uint32_t seed, std::int64_t i, std::int64_t j) {
  const std::uint64_t h = splitmix(splitmix(splitmix(seed) ^ std::uint64_t(i)) ^ std::uint64_t(j));
  return double(h >> 11) * (1.0 / 9007199254740992.0);
}

double value_noise(std::uint32_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto i = std::int64_t(fx), j = std::int64_t(fy);
  auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
  const double tx = smooth(x - fx), ty = smooth(y - fy);
  const double a = lattice_value(seed, i, j), b = lattice_value(seed, i + 1, j);
  const double c = lattice_value(seed, i, j + 1), d = lattice_value(seed, i + 1, j + 1);
  return (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
}

Eigen::Vector3d texture_color(const TextureSpec& t, double x, double y) {
  if (t.type == "noise") {
    Eigen::Vector3d c;
    for (int ch = 0; ch < 3; ++ch) {
      double v = 0.0, amp = 0.5, scale = 1.0 / t.cell;
      for (int octave = 0; octave < 3; ++octave) {
        v += amp * value_noise(t.seed * 3 + ch * 101 + octave * 7, x * scale, y * scale);
        amp *= 0.5;
        scale *= 2.0;
      }
      c[ch] = 255.0 * std::clamp(v / 0.875, 0.0, 1.0);
    }
    return c;
  }
  const double s = std::tanh(t.sharpness * std::sin(M_PI * x / t.cell) * std::sin(M_PI * y / t.cell));
  const double r = 0.5 + 0.35 * s + 0.05 * std::sin(2.0 * M_PI * x / 41.0);
  const double g = 0.5 + 0.25 * s * std::cos(2.0 * M_PI * y / 53.0) + 0.1 * std::sin(2.0 * M_PI * (x + y) / 67.0);
  const double b = 0.45 - 0.25 * s + 0.08 * std::cos(2.0 * M_PI * x / 29.0);
  return 255.0 * Eigen::Vector3d(r, g, b);
}

json to_json_vec(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

void SceneSpec::validate() const {
  if (!(extent_x > 0.0) || !(extent_y > 0.0)) throw ConfigError("scene extent must be positive");
  if (zone < 1 || zone > 60) throw ConfigError("invalid UTM zone");
  camera.validate();
  if (!(flight.frame_rate > 0.0)) throw ConfigError("frame rate must be positive");
  if (!(flight.speed > 0.0) || !(flight.line_spacing > 0.0)) throw ConfigError("flight speed and spacing must be positive");
  if (!(texture.gsd > 0.0) || !(texture.cell > 0.0) || texture.margin < 0.0) throw ConfigError("invalid texture");
  if (texture.type != "checkerboard" && texture.type != "noise") throw ConfigError("unknown texture " + texture.type);
  if (!(provider.scale > 0.0)) throw ConfigError("provider scale must be positive");
  const auto terrain = make_terrain(*this);
  if (!(flight.altitude > terrain->max_height())) throw ConfigError("flight altitude must clear the terrain");
}

SceneSpec scene_from_json(const json& j) {
  SceneSpec s;
  if (j.contains("origin")) {
    const auto& o = j["origin"];
    s.origin_easting = o.value("easting", s.origin_easting);
    s.origin_northing = o.value("northing", s.origin_northing);
    s.zone = o.value("zone", s.zone);
    s.north = o.value("north", s.north);
  }
  if (j.contains("extent")) {
    s.extent_x = j["extent"].at(0).get<double>();
    s.extent_y = j["extent"].at(1).get<double>();
  }
  if (j.contains("heightfield")) {
    const auto& h = j["heightfield"];
    auto& d = s.heightfield;
    d.type = h.value("type", d.type);
    d.elevation = h.value("elevation", d.elevation);
    d.slope_x = h.value("slope_x", d.slope_x);
    d.slope_y = h.value("slope_y", d.slope_y);
    d.amplitude = h.value("amplitude", d.amplitude);
    d.half_width = h.value("half_width", d.half_width);
    d.angle_deg = h.value("angle_deg", d.angle_deg);
    d.wavelength = h.value("wavelength", d.wavelength);
    d.components = h.value("components", d.components);
    d.seed = h.value("seed", d.seed);
  }
  if (j.contains("texture")) {
    const auto& t = j["texture"];
    auto& d = s.texture;
    d.type = t.value("type", d.type);
    d.cell = t.value("cell", d.cell);
    d.sharpness = t.value("sharpness", d.sharpness);
    d.gsd = t.value("gsd", d.gsd);
    d.margin = t.value("margin", d.margin);
    d.seed = t.value("seed", d.seed);
  }
  if (j.contains("camera")) {
    const auto& c = j["camera"];
    auto& d = s.camera;
    d.fx = c.value("fx", d.fx);
    d.fy = c.value("fy", d.fy);
    d.cx = c.value("cx", d.cx);
    d.cy = c.value("cy", d.cy);
    d.width = c.value("width", d.width);
    d.height = c.value("height", d.height);
  }
  if (j.contains("flight")) {
    const auto& f = j["flight"];
    auto& d = s.flight;
    d.altitude = f.value("altitude", d.altitude);
    d.speed = f.value("speed", d.speed);
    d.line_spacing = f.value("line_spacing", d.line_spacing);
    d.frame_rate = f.value("frame_rate", d.frame_rate);
  }
  if (j.contains("noise")) {
    const auto& n = j["noise"];
    auto& d = s.noise;
    d.gnss_sigma = n.value("gnss_sigma", d.gnss_sigma);
    d.heading_sigma = n.value("heading_sigma", d.heading_sigma);
    d.seed = n.value("seed", d.seed);
  }
  if (j.contains("provider")) {
    const auto& p = j["provider"];
    auto& d = s.provider;
    d.scale = p.value("scale", d.scale);
    d.yaw_deg = p.value("yaw_deg", d.yaw_deg);
    if (p.contains("offset"))
      d.offset = {p["offset"].at(0).get<double>(), p["offset"].at(1).get<double>(), p["offset"].at(2).get<double>()};
    d.jitter = p.value("jitter", d.jitter);
    d.seed = p.value("seed", d.seed);
    if (p.contains("lost"))
      for (const auto& r : p["lost"]) d.lost.emplace_back(r.at(0).get<std::uint64_t>(), r.at(1).get<std::uint64_t>());
    d.initializing = p.value("initializing", d.initializing);
    d.sparse_grid = p.value("sparse_grid", d.sparse_grid);
  }
  s.validate();
  return s;
}

json scene_to_json(const SceneSpec& s) {
  json lost = json::array();
  for (const auto& [a, b] : s.provider.lost) lost.push_back({a, b});
  const auto& h = s.heightfield;
  const auto& t = s.texture;
  const auto& c = s.camera;
  const auto& f = s.flight;
  const auto& p = s.provider;
  return {
      {"origin", {{"easting", s.origin_easting}, {"northing", s.origin_northing}, {"zone", s.zone}, {"north", s.north}}},
      {"extent", {s.extent_x, s.extent_y}},
      {"heightfield",
       {{"type", h.type}, {"elevation", h.elevation}, {"slope_x", h.slope_x}, {"slope_y", h.slope_y},
        {"amplitude", h.amplitude}, {"half_width", h.half_width}, {"angle_deg", h.angle_deg},
        {"wavelength", h.wavelength}, {"components", h.components}, {"seed", h.seed}}},
      {"texture",
       {{"type", t.type}, {"cell", t.cell}, {"sharpness", t.sharpness}, {"gsd", t.gsd}, {"margin", t.margin},
        {"seed", t.seed}}},
      {"camera",
       {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"width", c.width}, {"height", c.height}}},
      {"flight",
       {{"altitude", f.altitude}, {"speed", f.speed}, {"line_spacing", f.line_spacing},
        {"frame_rate", f.frame_rate}}},
      {"noise",
       {{"gnss_sigma", s.noise.gnss_sigma}, {"heading_sigma", s.noise.heading_sigma}, {"seed", s.noise.seed}}},
      {"provider",
       {{"scale", p.scale}, {"yaw_deg", p.yaw_deg}, {"offset", to_json_vec(p.offset)}, {"jitter", p.jitter},
        {"seed", p.seed}, {"lost", lost}, {"initializing", p.initializing}, {"sparse_grid", p.sparse_grid}}},
  };
}

SceneSpec load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read scene spec " + path.string());
  try {
    return scene_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError("malformed scene spec " + path.string() + ": " + e.what());
  }
}

std::shared_ptr<Terrain> make_terrain(const SceneSpec& spec) {
  const auto& type = spec.heightfield.type;
  if (type == "flat") return std::make_shared<FlatTerrain>(spec.heightfield.elevation);
  if (type == "ramp") return std::make_shared<RampTerrain>(spec, spec.texture.margin);
  if (type == "ridge") {
    if (!(spec.heightfield.half_width > 0.0)) throw ConfigError("ridge half width must be positive");
    return std::make_shared<RidgeTerrain>(spec);
  }
  if (type == "smooth-random") {
    if (!(spec.heightfield.wavelength > 0.0)) throw ConfigError("wavelength must be positive");
    return std::make_shared<SmoothRandomTerrain>(spec);
  }
  throw ConfigError("unknown heightfield " + type);
}

GroundTexture::GroundTexture(const SceneSpec& spec) : gsd_(spec.texture.gsd) {
  const double m = spec.texture.margin;
  origin_ = {spec.origin_easting - m, spec.origin_northing - m};
  const int w = int(std::ceil((spec.extent_x + 2.0 * m) / gsd_ - 1e-9));
  const int h = int(std::ceil((spec.extent_y + 2.0 * m) / gsd_ - 1e-9));
  image_ = Image(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // texture coordinates are local to the scene origin
      const double lx = -m + (x + 0.5) * gsd_;
      const double ly = -m + (h - y - 0.5) * gsd_;
      const Eigen::Vector3d c = texture_color(spec.texture, lx, ly);
      image_.set(x, y, {to_byte(c.x()), to_byte(c.y()), to_byte(c.z())});
    }
  }
}

Eigen::Vector3d GroundTexture::sample(double easting, double northing) const {
  const double u = std::clamp((easting - origin_.x()) / gsd_ - 0.5, 0.0, image_.width() - 1.0);
  const double v = std::clamp(image_.height() - (northing - origin_.y()) / gsd_ - 0.5, 0.0, image_.height() - 1.0);
  return image_.sample_bilinear(u, v);
}

LayeredGrid GroundTexture::geometry() const {
  return LayeredGrid(origin_, gsd_, 0, 0, image_.height(), image_.width());
}

std::vector<FlightFrame> plan_flight(const SceneSpec& spec) {
  spec.validate();
  const auto& f = spec.flight;
  const double step = f.speed / f.frame_rate;
  const double dt = 1.0 / f.frame_rate;
  const int lines = std::max(1, int(std::ceil(spec.extent_y / f.line_spacing - 1e-9)));
  const int per_line = int(std::floor(spec.extent_x / step + 1e-9)) + 1;

  std::mt19937 rng(spec.noise.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<FlightFrame> frames;
  double t = 0.0;
  for (int k = 0; k < lines; ++k) {
    const double y = std::min(spec.extent_y, (k + 0.5) * f.line_spacing);
    const bool east = k % 2 == 0;
    for (int i = 0; i < per_line; ++i) {
      const double x = east ? i * step : spec.extent_x - i * step;
      FlightFrame fr;
      fr.id = frames.size();
      fr.timestamp = t;
      UtmCoord c{spec.origin_easting + x, spec.origin_northing + y, spec.zone, spec.north, f.altitude};
      const double heading = east ? 90.0 : 270.0;
      fr.pose = default_pose(c, heading);
      fr.pose.source = PoseSource::Visual;
      UtmCoord noisy = c;
      noisy.easting += spec.noise.gnss_sigma * gauss(rng);
      noisy.northing += spec.noise.gnss_sigma * gauss(rng);
      noisy.altitude += spec.noise.gnss_sigma * gauss(rng);
      fr.geotag = utm_to_wgs84(noisy);
      fr.heading = heading + spec.noise.heading_sigma * gauss(rng);
      frames.push_back(fr);
      t += dt;
    }
    t += f.line_spacing / f.speed;
  }
  return frames;
}

Image render(const CameraModel& camera, const Pose& pose, const Terrain& terrain, const GroundTexture& texture,
             Execution exec) {
  Image image(camera.width, camera.height);
  const Eigen::Vector3d origin = pose.position();
  const bool parallel = exec == Execution::Parallel;
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      const Eigen::Vector3d ray = pixel_ray(camera, pose, {double(u), double(v)});
      const auto t = terrain.raycast(origin, ray);
      if (!t) continue;
      const Eigen::Vector3d hit = origin + *t * ray;
      const Eigen::Vector3d c = texture.sample(hit.x(), hit.y());
      image.set(u, v, {to_byte(c.x()), to_byte(c.y()), to_byte(c.z())});
    }
  }
  return image;
}

std::vector<Frame> synthesize_frames(const SceneSpec& spec, Execution exec) {
  const auto terrain = make_terrain(spec);
  const GroundTexture texture(spec);
  const auto plan = plan_flight(spec);
  std::vector<Frame> frames(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    Frame& fr = frames[i];
    fr.id = plan[i].id;
    fr.timestamp = plan[i].timestamp;
    fr.geotag = plan[i].geotag;
    fr.heading = plan[i].heading;
    fr.camera = spec.camera;
    fr.image = render(spec.camera, plan[i].pose, *terrain, texture, exec);
  }
  return frames;
}

void write_truth_poses(const std::filesystem::path& path, const std::vector<FlightFrame>& frames) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# id r00 r01 r02 t0 r10 r11 r12 t1 r20 r21 r22 t2\n";
  for (const auto& f : frames) {
    const auto m = f.pose.matrix();
    out << f.id;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) out << ' ' << fmt::format("{:.17g}", m(r, c));
    out << '\n';
  }
}

std::map<std::uint64_t, Pose> read_truth_poses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::map<std::uint64_t, Pose> poses;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::uint64_t id = 0;
    Eigen::Matrix<double, 3, 4> m;
    ss >> id;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) ss >> m(r, c);
    if (!ss) throw IoError("malformed pose line in " + path.string());
    Pose p;
    p.rotation = m.leftCols<3>();
    p.translation.easting = m(0, 3);
    p.translation.northing = m(1, 3);
    p.translation.altitude = m(2, 3);
    poses[id] = p;
  }
  return poses;
}

void generate(const SceneSpec& spec, const std::filesystem::path& out_dir, Execution exec) {
  namespace fs = std::filesystem;
  spec.validate();
  fs::create_directories(out_dir / "frames");
  fs::create_directories(out_dir / "truth");

  {
    std::ofstream cam(out_dir / "camera.txt");
    if (!cam) throw IoError("cannot write camera file");
    const auto& c = spec.camera;
    cam << fmt::format("fx: {:.17g}\nfy: {:.17g}\ncx: {:.17g}\ncy: {:.17g}\nwidth: {}\nheight: {}\n", c.fx, c.fy,
                       c.cx, c.cy, c.width, c.height);
  }

  const auto terrain = make_terrain(spec);
  const GroundTexture texture(spec);
  const auto plan = plan_flight(spec);
  for (const auto& f : plan) {
    const std::string stem = fmt::format("frame_{:05d}", f.id);
    write_png(out_dir / "frames" / (stem + ".png"), render(spec.camera, f.pose, *terrain, texture, exec));
    std::ofstream side(out_dir / "frames" / (stem + ".txt"));
    if (!side) throw IoError("cannot write sidecar " + stem);
    side << fmt::format(
        "id: {}\ntimestamp: {:.6f}\nlatitude: {:.12f}\nlongitude: {:.12f}\naltitude: {:.6f}\nheading: {:.9f}\n"
        "stabilized: 1\n",
        f.id, f.timestamp, f.geotag.latitude, f.geotag.longitude, f.geotag.altitude, f.heading);
  }

  write_truth_poses(out_dir / "truth" / "poses.txt", plan);

  const double hgsd = 0.25;
  LayeredGrid hf = create({spec.origin_easting, spec.origin_northing, spec.origin_easting + spec.extent_x,
                           spec.origin_northing + spec.extent_y},
                          hgsd, {std::string(layer::kElevation)});
  auto& z = hf.layer(layer::kElevation);
  for (int i = 0; i < hf.rows(); ++i)
    for (int j = 0; j < hf.cols(); ++j) {
      const Eigen::Vector2d p = hf.cell_center(i, j);
      z(i, j) = terrain->height(p.x(), p.y());
    }
  write_ascii_grid(out_dir / "truth" / "heightfield.asc", hf, layer::kElevation);

  write_png(out_dir / "truth" / "ortho.png", texture.image());
  write_world_file(out_dir / "truth" / "ortho.pgw", texture.geometry());

  std::ofstream scene(out_dir / "truth" / "scene.json");
  scene << scene_to_json(spec).dump(2) << '\n';
}

SyntheticPoseProvider::SyntheticPoseProvider(std::map<std::uint64_t, Pose> truth, ProviderSpec spec,
                                             std::shared_ptr<const Terrain> terrain)
    : truth_(std::move(truth)),
      spec_(std::move(spec)),
      terrain_(std::move(terrain)),
      yaw_(Eigen::AngleAxisd(spec_.yaw_deg * kDegToRad, Eigen::Vector3d::UnitZ()).toRotationMatrix()),
      rng_(spec_.seed) {
  if (!(spec_.scale > 0.0)) throw ConfigError("provider scale must be positive");
}

pose::TrackResult SyntheticPoseProvider::track(const Frame& frame) {
  const std::size_t call = calls_++;
  if (call < spec_.initializing) return pose::TrackResult::initializing();
  for (const auto& [first, last] : spec_.lost)
    if (frame.id >= first && frame.id <= last) return pose::TrackResult::lost();
  const auto it = truth_.find(frame.id);
  if (it == truth_.end()) return pose::TrackResult::lost();
  const Pose& truth = it->second;

  auto to_visual = [&](const Eigen::Vector3d& w) -> Eigen::Vector3d {
    return yaw_.transpose() * (w - spec_.offset) / spec_.scale;
  };
  pose::LocalPose local;
  local.leftCols<3>() = yaw_.transpose() * truth.rotation;
  Eigen::Vector3d c = to_visual(truth.position());
  if (spec_.jitter > 0.0) {
    std::normal_distribution<double> gauss(0.0, spec_.jitter);
    c += Eigen::Vector3d(gauss(rng_), gauss(rng_), gauss(rng_));
  }
  local.col(3) = c;

  std::vector<Eigen::Vector3d> points;
  if (terrain_ && spec_.sparse_grid > 0) {
    const CameraModel& cam = frame.camera;
    const int g = spec_.sparse_grid;
    for (int a = 0; a < g; ++a)
      for (int b = 0; b < g; ++b) {
        const Eigen::Vector2d px((b + 0.5) * cam.width / g - 0.5, (a + 0.5) * cam.height / g - 0.5);
        const Eigen::Vector3d ray = pixel_ray(cam, truth, px);
        if (auto t = terrain_->raycast(truth.position(), ray)) points.push_back(to_visual(truth.position() + *t * ray));
      }
  }
  return pose::TrackResult::tracking(local, std::move(points));
}

LayeredGrid::Raster footprint_mask(const LayeredGrid& grid, const Terrain& terrain, const CameraModel& camera,
                                   const std::vector<Pose>& poses) {
  LayeredGrid::Raster mask = LayeredGrid::Raster::Zero(grid.rows(), grid.cols());
  const double zlow = terrain.min_height();
  for (const Pose& pose : poses) {
    RegionOfInterest box;
    try {
      box = ground_footprint(camera, pose, zlow);
    } catch (const DomainError&) {
      continue;
    }
    const RegionOfInterest ext = grid.extent();
    const int c0 = std::max(0, int(std::floor((box.min_easting - ext.min_easting) / grid.gsd())));
    const int c1 = std::min(grid.cols(), int(std::ceil((box.max_easting - ext.min_easting) / grid.gsd())));
    const int r0 = std::max(0, int(std::floor((box.min_northing - ext.min_northing) / grid.gsd())));
    const int r1 = std::min(grid.rows(), int(std::ceil((box.max_northing - ext.min_northing) / grid.gsd())));
#pragma omp parallel for schedule(static)
    for (int i = r0; i < r1; ++i)
      for (int j = c0; j < c1; ++j) {
        if (mask(i, j) == 1.0) continue;
        const Eigen::Vector2d p = grid.cell_center(i, j);
        try {
          if (project(camera, pose, {p.x(), p.y(), terrain.height(p.x(), p.y())}).in_view) mask(i, j) = 1.0;
        } catch (const BehindCameraError&) {
        }
      }
  }
  return mask;
}

ElevationComparison compare_elevation(const LayeredGrid& result, const Terrain& truth,
                                      const LayeredGrid::Raster* footprint) {
  ElevationComparison out;
  const auto& z = result.layer(layer::kElevation);
  const bool has_valid = result.has_layer(layer::kValid);
  double sq = 0.0;
  for (int i = 0; i < result.rows(); ++i)
    for (int j = 0; j < result.cols(); ++j) {
      const bool inside = footprint && (*footprint)(i, j) == 1.0;
      out.footprint_cells += inside;
      if ((has_valid && !result.valid(i, j)) || std::isnan(z(i, j))) continue;
      const Eigen::Vector2d p = result.cell_center(i, j);
      const double d = z(i, j) - truth.height(p.x(), p.y());
      sq += d * d;
      ++out.valid_cells;
      out.covered_cells += inside;
    }
  out.rmse = out.valid_cells ? std::sqrt(sq / double(out.valid_cells)) : 0.0;
  out.coverage = footprint ? (out.footprint_cells ? double(out.covered_cells) / double(out.footprint_cells) : 0.0)
                           : 1.0;
  return out;
}

}  // namespace aeromap::synth
