#pragma once

#include <cstdint>
#include <vector>

#include "simpl/geometry.hpp"
#include "simpl/image.hpp"
#include "simpl/sampler.hpp"
#include "simpl/scene.hpp"

namespace simpl {

// Shadows are undefined for a sun on the horizon; lower elevations are
// raised to this value.
inline constexpr double kMinShadowElevationDeg = 1.0;

// Flat Lambertian lighting with an ambient floor and hard cast shadows.
//
// Sun direction convention: azimuth is a compass bearing measured clockwise
// from north, where north is image-up (world -y). Elevation is measured up
// from the ground plane. `sun_direction` points from the ground towards the
// sun.
struct ShadingModel {
  double ambient = 0.3;
  double intensity = 1.0;
  double elevation_deg = 90.0;  // after clamping
  double azimuth_deg = 0.0;
  bool elevation_clamped = false;
  Vec3 sun_direction{0.0, 0.0, 1.0};

  static ShadingModel from_solar(const SolarParams& solar, double ambient);

  // min(1, A + intensity * max(0, n . l)) for a unit normal.
  double surface_gain(const Vec3& unit_normal) const;
  // Lit ground multiplier, normalised so intensity 1 at 90 degrees leaves the
  // background texel unchanged.
  double ground_gain() const;
  double shadow_gain() const { return ambient; }
  // Ground displacement (meters) of a point's shadow per meter of height.
  Vec2 shadow_offset_per_meter() const;
};

// floor(meters / gsd), tolerant of representation error in the quotient.
int raster_extent(double meters, double gsd);

// Per-pixel record of what the RGB pass drew, for congruence checks.
struct RenderTrace {
  std::vector<std::uint8_t> surface;  // 1 where an object surface was drawn
  std::vector<std::uint8_t> shadow;   // 1 where ground is in cast shadow
};

// Nadir orthographic render at the scene gsd. Output has the background's
// dimensions; objects are depth-buffered, ground is lit or shadowed.
RasterImage render_rgb(const Scene& scene, RenderTrace* trace = nullptr);

// Single-channel mask render: 0 wherever an object triangle covers the pixel
// centre, 255 elsewhere. Uses the same coverage rule as render_rgb.
RasterImage render_gt(const Scene& scene);

}  // namespace simpl
