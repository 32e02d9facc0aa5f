#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "simpl/config.hpp"
#include "simpl/geometry.hpp"
#include "simpl/image.hpp"
#include "simpl/mesh.hpp"
#include "simpl/sampler.hpp"

namespace simpl {

struct SceneInstance {
  InstanceProps props;
  Pose pose;
  std::size_t mesh_ref = 0;
  OrientedRect world_footprint;  // meters
};

// One virtual world: a background tile used as the ground plane, the objects
// placed on it and a single sun. World x runs along image columns and world y
// along image rows (downwards), both in meters.
struct Scene {
  std::shared_ptr<const RasterImage> background;
  std::shared_ptr<const std::vector<Mesh>> meshes;
  double gsd = 0.3;
  double ambient = 0.3;
  std::vector<SceneInstance> instances;
  SolarParams solar;
  std::size_t image_index = 0;

  int width_px() const { return background ? background->width : 0; }
  int height_px() const { return background ? background->height : 0; }
  double width_m() const { return width_px() * gsd; }
  double height_m() const { return height_px() * gsd; }
  double area_km2() const { return width_m() * height_m() / 1.0e6; }
};

inline constexpr std::size_t kPlacementAttemptsPerInstance = 1000;

// round(density * area)
std::size_t target_instance_count(double density_per_km2, double area_km2);

// Places target_instance_count objects by rejection sampling. Footprints stay
// fully inside the tile and any two are more than two pixels apart, so their
// rasterizations are never 8-adjacent. Throws
// GenerationError once kPlacementAttemptsPerInstance * count attempts fail.
Scene build_scene(const DesignConfig& config, std::size_t image_index,
                  std::shared_ptr<const std::vector<Mesh>> meshes,
                  std::shared_ptr<const RasterImage> background);

// Analytic axis-aligned bounds of the instance's nadir projection, in pixels.
Box2 projected_box_px(const Scene& scene, const SceneInstance& instance);

}  // namespace simpl
