#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace YAML {
class Node;
}

namespace simpl {

// Closed interval [lower, upper] of a uniform sampling distribution.
struct Bounds {
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

using Rgb = std::array<double, 3>;

// Object plan size in pixels: length runs along the model's x axis, width
// along its y axis.
struct SizePx {
  double length = 0.0;
  double width = 0.0;

  friend bool operator==(const SizePx&, const SizePx&) = default;
};

// Every knob of a generation run. The master seed plus this struct fully
// determine the output dataset.
struct DesignConfig {
  int class_id = 1;
  std::vector<std::filesystem::path> mesh_paths;
  std::vector<std::filesystem::path> background_paths;

  Rgb color_mean{128.0, 128.0, 128.0};
  double color_std = 0.0;
  SizePx size_mean{1.0, 1.0};
  double size_std = 0.0;

  Bounds solar_elevation{90.0, 90.0};
  Bounds solar_azimuth{0.0, 0.0};
  Bounds solar_intensity{1.0, 1.0};

  double density = 120.0;  // targets per km^2
  double gsd = 0.3;        // meters per pixel
  int patch_size = 608;
  int num_patches = 450;
  std::uint64_t master_seed = 0;
  double ambient = 0.3;
  double min_visibility = 0.25;

  friend bool operator==(const DesignConfig&, const DesignConfig&) = default;
};

// Throws ValidationError naming the first offending field.
void validate(const DesignConfig& config);

// Parses the YAML configuration schema. Relative paths are resolved against
// `base_dir` when it is non-empty. Throws ParseError (with line context) or
// ValidationError.
DesignConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
DesignConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const DesignConfig& config);
YAML::Node config_to_yaml(const DesignConfig& config);

// Aggregated hand measurements of real targets.
struct TargetEstimates {
  SizePx size_mean;
  double size_std = 0.0;
  Rgb color_mean{};
  double color_std = 0.0;
};

// Means are arithmetic; the scalar standard deviations pool the sample
// variances (n - 1 denominator) of every vector component.
TargetEstimates estimate_target_params(std::span<const SizePx> size_samples,
                                       std::span<const Rgb> color_samples);

struct SolarObservation {
  double elevation = 0.0;
  double azimuth = 0.0;
  double intensity = 0.0;
};

struct SolarBounds {
  Bounds elevation;
  Bounds azimuth;
  Bounds intensity;
};

// Componentwise min/max over inspected images.
SolarBounds estimate_solar_bounds(std::span<const SolarObservation> observations);

enum class SweepParameter { kColorMean, kSizeMean, kNumPatches };

SweepParameter parse_sweep_parameter(std::string_view name);
std::string_view to_string(SweepParameter parameter);

// Percentage offsets scale the chosen mean by (1 + p/100); color channels are
// clamped to [0, 255]. For kNumPatches each offset is the new K.
std::vector<DesignConfig> make_sweep_configs(const DesignConfig& base, SweepParameter parameter,
                                             std::span<const double> offsets);

}  // namespace simpl
