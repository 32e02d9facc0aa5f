#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "simpl/config.hpp"
#include "simpl/geometry.hpp"

namespace simpl {

// Triangle mesh in model space (meters, z up). The model's x axis is its
// length axis; by convention it is the larger plan dimension.
struct Mesh {
  std::string name;
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  // Plan-view bounds of the model (x/y extent of all vertices).
  Box2 plan_bounds() const;
};

// Placement of a mesh on the ground plane. `position` is where the centre of
// the model's plan bounds lands, in world meters. Heading rotates the model's
// length axis from world +x towards world +y.
struct Pose {
  Vec2 position;
  double heading_deg = 0.0;
  Vec3 scale{1.0, 1.0, 1.0};
};

// Parses the supported Wavefront OBJ subset (`v` and `f` records). Faces
// with more than three vertices are fan-triangulated and the model is shifted
// so its lowest vertex sits at z = 0. Unsupported record types are skipped
// and reported through `warnings` when given.
Mesh parse_obj(std::string_view text, std::string name,
               std::vector<std::string>* warnings = nullptr);
Mesh load_mesh(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

// Model-to-world mapping for one posed mesh (meters; z is height).
class PlacementTransform {
 public:
  PlacementTransform(const Mesh& mesh, const Pose& pose);

  Vec3 apply(const Vec3& model_point) const;

 private:
  Vec2 pivot_;
  Vec2 position_;
  Vec3 scale_;
  double cos_ = 1.0;
  double sin_ = 0.0;
};

Vec3 transform_point(const Mesh& mesh, const Pose& pose, const Vec3& model_point);

struct Footprint {
  // Axis-aligned world extent of the posed ground projection.
  double extent_x = 0.0;
  double extent_y = 0.0;
  // Oriented bounding rectangle used for collision and containment.
  OrientedRect rect;
};

Footprint footprint_extent(const Mesh& mesh, const Pose& pose);

// Scale that makes the model's plan dimensions match `target` pixels at the
// given gsd. Height scales by the geometric mean of the two plan factors.
Vec3 size_to_scale(const Mesh& mesh, const SizePx& target, double gsd);

}  // namespace simpl
