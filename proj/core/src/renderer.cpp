#include "simpl/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simpl/errors.hpp"

namespace simpl {

ShadingModel ShadingModel::from_solar(const SolarParams& solar, double ambient) {
  ShadingModel m;
  m.ambient = ambient;
  m.intensity = solar.intensity;
  m.azimuth_deg = solar.azimuth_deg;
  m.elevation_deg = solar.elevation_deg;
  if (m.elevation_deg < kMinShadowElevationDeg) {
    m.elevation_deg = kMinShadowElevationDeg;
    m.elevation_clamped = true;
  }
  const double el = deg_to_rad(m.elevation_deg);
  const double az = deg_to_rad(m.azimuth_deg);
  m.sun_direction = {std::cos(el) * std::sin(az), -std::cos(el) * std::cos(az), std::sin(el)};
  return m;
}

double ShadingModel::surface_gain(const Vec3& n) const {
  return std::min(1.0, ambient + intensity * std::max(0.0, dot(n, sun_direction)));
}

double ShadingModel::ground_gain() const {
  const double reference = std::min(1.0, ambient + 1.0);
  return std::min(1.0, ambient + intensity * std::sin(deg_to_rad(elevation_deg))) / reference;
}

Vec2 ShadingModel::shadow_offset_per_meter() const {
  const double az = deg_to_rad(azimuth_deg);
  const double inv_tan = 1.0 / std::tan(deg_to_rad(elevation_deg));
  return {-std::sin(az) * inv_tan, std::cos(az) * inv_tan};
}

int raster_extent(double meters, double gsd) {
  return static_cast<int>(std::floor(meters / gsd + 1e-9));
}

namespace {

// Calls fn(index, w_a, w_b, w_c) for every pixel whose centre lies inside
// (or on the edge of) triangle abc, given in pixel coordinates.
template <typename Fn>
void rasterize_triangle(Vec2 a, Vec2 b, Vec2 c, int width, int height, Fn&& fn) {
  double area = cross(b - a, c - a);
  if (std::abs(area) < 1e-12) return;
  if (area < 0.0) {
    std::swap(b, c);
    area = -area;
  }
  const double min_x = std::min({a.x, b.x, c.x});
  const double max_x = std::max({a.x, b.x, c.x});
  const double min_y = std::min({a.y, b.y, c.y});
  const double max_y = std::max({a.y, b.y, c.y});
  const int x0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
  const int x1 = std::min(width - 1, static_cast<int>(std::floor(max_x - 0.5)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
  const int y1 = std::min(height - 1, static_cast<int>(std::floor(max_y - 0.5)));
  const double inv_area = 1.0 / area;
  for (int y = y0; y <= y1; ++y) {
    const double py = y + 0.5;
    for (int x = x0; x <= x1; ++x) {
      const Vec2 p{x + 0.5, py};
      const double wa = cross(c - b, p - b);
      const double wb = cross(a - c, p - c);
      const double wc = cross(b - a, p - a);
      if (wa < 0.0 || wb < 0.0 || wc < 0.0) continue;
      fn(static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x),
         wa * inv_area, wb * inv_area, wc * inv_area);
    }
  }
}

struct WorldTriangle {
  Vec3 v[3];
};

// Visits every instance triangle in world meters, in scene order.
template <typename Fn>
void for_each_triangle(const Scene& scene, Fn&& fn) {
  std::vector<Vec3> world;
  for (std::size_t i = 0; i < scene.instances.size(); ++i) {
    const SceneInstance& inst = scene.instances[i];
    const Mesh& mesh = (*scene.meshes)[inst.mesh_ref];
    const PlacementTransform transform(mesh, inst.pose);
    world.resize(mesh.vertices.size());
    std::transform(mesh.vertices.begin(), mesh.vertices.end(), world.begin(),
                   [&](const Vec3& v) { return transform.apply(v); });
    for (const auto& tri : mesh.triangles) {
      fn(i, WorldTriangle{{world[tri[0]], world[tri[1]], world[tri[2]]}});
    }
  }
}

Vec2 to_pixels(const Vec3& p, double gsd) { return {p.x / gsd, p.y / gsd}; }

void check_scene(const Scene& scene) {
  if (!scene.background || scene.background->width <= 0 || scene.background->height <= 0) {
    throw ValidationError("render: scene has no background");
  }
  if (scene.background->channels != 3 && scene.background->channels != 1) {
    throw ValidationError("render: background must have 1 or 3 channels");
  }
  if (!(scene.gsd > 0.0)) {
    throw ValidationError("render: gsd must be > 0");
  }
  if (!scene.instances.empty() && !scene.meshes) {
    throw ValidationError("render: scene has instances but no meshes");
  }
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

RasterImage render_rgb(const Scene& scene, RenderTrace* trace) {
  check_scene(scene);
  const RasterImage& bg = *scene.background;
  const int width = bg.width;
  const int height = bg.height;
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  const ShadingModel shading = ShadingModel::from_solar(scene.solar, scene.ambient);

  RasterImage out(width, height, 3, scene.gsd);
  std::vector<float> depth(n, -std::numeric_limits<float>::infinity());
  std::vector<std::uint8_t> surface(n, 0);
  std::vector<std::uint8_t> shadow(n, 0);
  const Vec2 shadow_step = shading.shadow_offset_per_meter();

  for_each_triangle(scene, [&](std::size_t instance, const WorldTriangle& t) {
    const Vec2 a = to_pixels(t.v[0], scene.gsd);
    const Vec2 b = to_pixels(t.v[1], scene.gsd);
    const Vec2 c = to_pixels(t.v[2], scene.gsd);

    // Shadow footprint: each vertex slides along the sun ray to the ground.
    auto on_ground = [&](const Vec3& p) {
      return Vec2{(p.x + shadow_step.x * p.z) / scene.gsd, (p.y + shadow_step.y * p.z) / scene.gsd};
    };
    rasterize_triangle(on_ground(t.v[0]), on_ground(t.v[1]), on_ground(t.v[2]), width, height,
                       [&](std::size_t idx, double, double, double) { shadow[idx] = 1; });

    Vec3 normal = cross(t.v[1] - t.v[0], t.v[2] - t.v[0]);
    const double len = norm(normal);
    if (len > 0.0) normal = normal * (1.0 / len);
    if (normal.z < 0.0) normal = normal * -1.0;
    const double gain = shading.surface_gain(normal);
    const Rgb& color = scene.instances[instance].props.color;
    const std::uint8_t rgb[3] = {to_byte(color[0] * gain), to_byte(color[1] * gain),
                                 to_byte(color[2] * gain)};
    const double za = t.v[0].z;
    const double zb = t.v[1].z;
    const double zc = t.v[2].z;
    rasterize_triangle(a, b, c, width, height, [&](std::size_t idx, double wa, double wb, double wc) {
      const auto z = static_cast<float>(wa * za + wb * zb + wc * zc);
      surface[idx] = 1;
      if (z > depth[idx]) {
        depth[idx] = z;
        std::copy(rgb, rgb + 3, out.pixels.data() + idx * 3);
      }
    });
  });

  const double lit = shading.ground_gain();
  const double dark = shading.shadow_gain();
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (surface[idx]) continue;
    const double g = shadow[idx] ? dark : lit;
    for (int ch = 0; ch < 3; ++ch) {
      const std::uint8_t texel =
          bg.channels == 3 ? bg.pixels[idx * 3 + static_cast<std::size_t>(ch)] : bg.pixels[idx];
      out.pixels[idx * 3 + static_cast<std::size_t>(ch)] = g == 1.0 ? texel : to_byte(texel * g);
    }
  }

  if (trace != nullptr) {
    trace->surface = std::move(surface);
    trace->shadow = std::move(shadow);
  }
  return out;
}

RasterImage render_gt(const Scene& scene) {
  check_scene(scene);
  const int width = scene.background->width;
  const int height = scene.background->height;
  RasterImage out(width, height, 1, scene.gsd, 255);
  for_each_triangle(scene, [&](std::size_t, const WorldTriangle& t) {
    rasterize_triangle(to_pixels(t.v[0], scene.gsd), to_pixels(t.v[1], scene.gsd),
                       to_pixels(t.v[2], scene.gsd), width, height,
                       [&](std::size_t idx, double, double, double) { out.pixels[idx] = 0; });
  });
  return out;
}

}  // namespace simpl
