#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "simpl/renderer.hpp"

namespace simpl::test {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path asset_dir() { return SIMPL_TEST_ASSET_DIR; }

Mesh box_mesh(double length, double width, double height, const std::string& name) {
  Mesh m;
  m.name = name;
  m.vertices = {{0, 0, 0},           {length, 0, 0},          {length, width, 0},
                {0, width, 0},       {0, 0, height},          {length, 0, height},
                {length, width, height}, {0, width, height}};
  m.triangles = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
                 {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  return m;
}

RasterImage flat_background(int width, int height, std::uint8_t value, double gsd, int channels) {
  return RasterImage(width, height, channels, gsd, value);
}

RasterImage noise_background(int width, int height, double gsd, std::uint64_t seed) {
  RasterImage img(width, height, 3, gsd);
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::uniform_int_distribution<int> dist(40, 215);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(dist(rng));
  return img;
}

DesignConfig airliner_config(std::uint64_t seed) {
  DesignConfig c;
  c.class_id = 1;
  c.master_seed = seed;
  c.mesh_paths = {asset_dir() / "meshes" / "airliner.obj"};
  c.background_paths = {asset_dir() / "backgrounds" / "tarmac_000.png",
                        asset_dir() / "backgrounds" / "apron_000.png"};
  c.color_mean = {175, 175, 178};
  c.color_std = 18;
  c.size_mean = {100, 90};
  c.size_std = 6;
  c.solar_elevation = {35, 70};
  c.solar_azimuth = {100, 220};
  c.solar_intensity = {0.8, 1.2};
  c.num_patches = 6;
  return c;
}

Scene manual_scene(std::vector<Mesh> meshes, RasterImage background, double ambient,
                   const SolarParams& solar) {
  Scene s;
  s.gsd = background.gsd;
  s.background = std::make_shared<const RasterImage>(std::move(background));
  s.meshes = std::make_shared<const std::vector<Mesh>>(std::move(meshes));
  s.ambient = ambient;
  s.solar = solar;
  return s;
}

void add_instance(Scene& scene, std::size_t mesh_ref, Vec2 position, double heading_deg,
                  Vec3 scale, Rgb color) {
  SceneInstance inst;
  inst.mesh_ref = mesh_ref;
  inst.props.color = color;
  inst.props.heading_deg = heading_deg;
  inst.props.mesh_choice = mesh_ref;
  inst.pose.position = position;
  inst.pose.heading_deg = heading_deg;
  inst.pose.scale = scale;
  inst.world_footprint = footprint_extent((*scene.meshes)[mesh_ref], inst.pose).rect;
  scene.instances.push_back(inst);
}

ShadowMeasure measure_post_shadow(double height_m, double gsd, double elevation_deg,
                                  double azimuth_deg) {
  constexpr int kSide = 400;
  Scene s = manual_scene({box_mesh(2 * gsd, 2 * gsd, height_m, "post")},
                         flat_background(kSide, kSide, 200, gsd), 0.3,
                         {elevation_deg, azimuth_deg, 1.0});
  add_instance(s, 0, {0.5 * kSide * gsd, 0.5 * kSide * gsd}, 0.0, {1, 1, 1}, {50, 50, 50});
  RenderTrace trace;
  render_rgb(s, &trace);

  const double az = deg_to_rad(azimuth_deg);
  const Vec2 dir{-std::sin(az), std::cos(az)};
  double post_far = -1e9, shadow_far = -1e9;
  double post_x = 0, post_y = 0, post_n = 0, sh_x = 0, sh_y = 0, sh_n = 0;
  for (int y = 0; y < kSide; ++y) {
    for (int x = 0; x < kSide; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * kSide + x;
      const double along = dot(Vec2{x + 0.5, y + 0.5}, dir);
      if (trace.surface[i]) {
        post_far = std::max(post_far, along);
        post_x += x;
        post_y += y;
        ++post_n;
      } else if (trace.shadow[i]) {
        shadow_far = std::max(shadow_far, along);
        sh_x += x;
        sh_y += y;
        ++sh_n;
      }
    }
  }
  ShadowMeasure m;
  if (post_n == 0 || sh_n == 0) return m;
  m.length_px = shadow_far - post_far;
  const double dx = sh_x / sh_n - post_x / post_n;
  const double dy = sh_y / sh_n - post_y / post_n;
  m.bearing_deg = std::fmod(rad_to_deg(std::atan2(dx, -dy)) + 360.0, 360.0);
  return m;
}

double angle_diff(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 360.0);
  return std::min(d, 360.0 - d);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace simpl::test
