#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "simpl/config.hpp"
#include "simpl/image.hpp"
#include "simpl/mesh.hpp"
#include "simpl/scene.hpp"

namespace simpl::test {

// Directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "simpl");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path asset_dir();

// Closed axis-aligned box, `length` along x, `width` along y, resting on z = 0.
Mesh box_mesh(double length, double width, double height, const std::string& name = "box");

// Flat RGB (or gray, when channels = 1) canvas.
RasterImage flat_background(int width, int height, std::uint8_t value, double gsd,
                            int channels = 3);

// Deterministic textured RGB canvas with values in [40, 215].
RasterImage noise_background(int width, int height, double gsd, std::uint64_t seed);

// Config referring to the bundled airliner mesh and backgrounds.
DesignConfig airliner_config(std::uint64_t seed = 7);

// Scene with hand-placed instances and a chosen sun; bypasses placement.
Scene manual_scene(std::vector<Mesh> meshes, RasterImage background, double ambient,
                   const SolarParams& solar);
void add_instance(Scene& scene, std::size_t mesh_ref, Vec2 position, double heading_deg,
                  Vec3 scale, Rgb color);

struct ShadowMeasure {
  double length_px = 0.0;    // shadow tip beyond the post's far edge, along the expected direction
  double bearing_deg = 0.0;  // shadow centroid relative to post centroid, compass degrees
};

// Renders one thin post of the given height and measures its ground shadow.
ShadowMeasure measure_post_shadow(double height_m, double gsd, double elevation_deg,
                                  double azimuth_deg);

// Smallest absolute difference between two bearings, in degrees.
double angle_diff(double a, double b);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace simpl::test
