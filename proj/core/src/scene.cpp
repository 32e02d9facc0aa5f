#include "simpl/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simpl/errors.hpp"

namespace simpl {

std::size_t target_instance_count(double density_per_km2, double area_km2) {
  return static_cast<std::size_t>(std::llround(density_per_km2 * area_km2));
}

Scene build_scene(const DesignConfig& config, std::size_t image_index,
                  std::shared_ptr<const std::vector<Mesh>> meshes,
                  std::shared_ptr<const RasterImage> background) {
  if (!meshes || meshes->empty()) {
    throw ValidationError("build_scene: at least one mesh is required");
  }
  if (!background || background->width <= 0 || background->height <= 0) {
    throw ValidationError("build_scene: background image is empty");
  }
  if (config.mesh_paths.size() != meshes->size()) {
    throw ValidationError("build_scene: mesh list does not match config.mesh_paths");
  }

  Scene scene;
  scene.background = std::move(background);
  scene.meshes = std::move(meshes);
  scene.gsd = config.gsd;
  scene.ambient = config.ambient;
  scene.image_index = image_index;

  RngStream solar_stream = RngStream::derive(config.master_seed, StreamPurpose::kSolar, image_index);
  scene.solar = sample_solar(config, solar_stream);

  const double width_m = scene.width_m();
  const double height_m = scene.height_m();
  const Box2 tile{0.0, 0.0, width_m, height_m};
  const std::size_t target = target_instance_count(config.density, scene.area_km2());
  const std::size_t max_attempts = kPlacementAttemptsPerInstance * target;
  const double clearance = config.gsd;

  std::vector<OrientedRect> keep_out;
  keep_out.reserve(target);
  scene.instances.reserve(target);
  std::size_t attempts = 0;

  for (std::size_t i = 0; i < target; ++i) {
    RngStream prop_stream =
        RngStream::derive(config.master_seed, StreamPurpose::kInstance, image_index, i);
    const InstanceProps props = sample_instance(config, prop_stream);
    const Mesh& mesh = (*scene.meshes)[props.mesh_choice];

    Pose pose;
    pose.heading_deg = props.heading_deg;
    pose.scale = size_to_scale(mesh, props.size, config.gsd);
    const Footprint centred = footprint_extent(mesh, pose);
    const Box2 local = centred.rect.bounds();
    const double half_x = 0.5 * local.width();
    const double half_y = 0.5 * local.height();

    RngStream place_stream =
        RngStream::derive(config.master_seed, StreamPurpose::kPlacement, image_index, i);
    bool placed = false;
    while (!placed) {
      if (attempts >= max_attempts) {
        throw GenerationError("placement failed for image " + std::to_string(image_index) +
                              ": placed " + std::to_string(scene.instances.size()) + " of " +
                              std::to_string(target) + " objects after " +
                              std::to_string(attempts) +
                              " attempts (density infeasible for tile and object size)");
      }
      ++attempts;
      if (2.0 * half_x > width_m || 2.0 * half_y > height_m) {
        continue;
      }
      OrientedRect rect = centred.rect;
      rect.center = {place_stream.uniform(half_x, width_m - half_x),
                     place_stream.uniform(half_y, height_m - half_y)};
      if (!contains(tile, rect)) {
        continue;
      }
      const OrientedRect padded = rect.inflated(clearance);
      const bool collides = std::any_of(keep_out.begin(), keep_out.end(), [&](const OrientedRect& o) {
        return intersects(padded, o);
      });
      if (collides) {
        continue;
      }
      pose.position = rect.center;
      keep_out.push_back(padded);
      scene.instances.push_back({props, pose, props.mesh_choice, rect});
      placed = true;
    }
  }
  return scene;
}

Box2 projected_box_px(const Scene& scene, const SceneInstance& instance) {
  const Mesh& mesh = (*scene.meshes)[instance.mesh_ref];
  const PlacementTransform transform(mesh, instance.pose);
  Box2 box{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const Vec3& v : mesh.vertices) {
    const Vec3 w = transform.apply(v);
    box.min_x = std::min(box.min_x, w.x / scene.gsd);
    box.min_y = std::min(box.min_y, w.y / scene.gsd);
    box.max_x = std::max(box.max_x, w.x / scene.gsd);
    box.max_y = std::max(box.max_y, w.y / scene.gsd);
  }
  return box;
}

}  // namespace simpl
