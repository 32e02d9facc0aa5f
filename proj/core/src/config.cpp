#include "simpl/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "simpl/errors.hpp"

namespace simpl {

namespace {

std::string where(const YAML::Mark& mark) {
  if (mark.is_null()) {
    return "";
  }
  return "line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) +
         ": ";
}

[[noreturn]] void fail_validation(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& section,
                const std::set<std::string>& allowed) {
  if (!node.IsMap()) {
    throw ParseError(where(node.Mark()) + "'" + section + "' must be a mapping");
  }
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      const std::string prefix = section.empty() ? "" : section + ".";
      throw ParseError(where(kv.first.Mark()) + "unknown key '" + prefix + key + "'");
    }
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError(where(node.Mark()) + field + ": expected a " +
                     (std::is_integral_v<T> ? "integer" : "number"));
  }
}

YAML::Node required(const YAML::Node& parent, const char* key, const std::string& field) {
  YAML::Node node = parent[key];
  if (!node) {
    throw ParseError(where(parent.Mark()) + "missing required field '" + field + "'");
  }
  return node;
}

template <std::size_t N>
std::array<double, N> fixed_vector(const YAML::Node& node, const std::string& field) {
  if (!node.IsSequence() || node.size() != N) {
    throw ParseError(where(node.Mark()) + field + ": expected a list of " + std::to_string(N) +
                     " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = scalar<double>(node[i], field);
  }
  return out;
}

Bounds bounds(const YAML::Node& node, const std::string& field) {
  const auto pair = fixed_vector<2>(node, field);
  return {pair[0], pair[1]};
}

std::vector<std::filesystem::path> path_list(const YAML::Node& node, const std::string& field,
                                             const std::filesystem::path& base_dir) {
  if (!node.IsSequence()) {
    throw ParseError(where(node.Mark()) + field + ": expected a list of paths");
  }
  std::vector<std::filesystem::path> out;
  for (const auto& item : node) {
    std::filesystem::path p = scalar<std::string>(item, field);
    if (!base_dir.empty() && p.is_relative()) {
      p = base_dir / p;
    }
    out.push_back(p.lexically_normal());
  }
  return out;
}

void check_bounds(const Bounds& b, double lo, double hi, const std::string& field) {
  if (!std::isfinite(b.lower) || !std::isfinite(b.upper)) {
    fail_validation(field, "bounds must be finite");
  }
  if (b.lower > b.upper) {
    fail_validation(field, "lower bound exceeds upper bound");
  }
  if (b.lower < lo || b.upper > hi) {
    std::ostringstream msg;
    msg << "bounds must lie within [" << lo << ", " << hi << "]";
    fail_validation(field, msg.str());
  }
}

YAML::Node flow_seq(std::initializer_list<double> values) {
  YAML::Node node(YAML::NodeType::Sequence);
  for (double v : values) {
    node.push_back(v);
  }
  node.SetStyle(YAML::EmitterStyle::Flow);
  return node;
}

double sample_variance_sum(std::span<const double> values, double& mean_out) {
  double mean = 0.0;
  for (double v : values) {
    mean += v;
  }
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  mean_out = mean;
  return ss;
}

}  // namespace

void validate(const DesignConfig& c) {
  if (c.class_id < 1) fail_validation("class_id", "must be >= 1");
  if (c.mesh_paths.empty()) fail_validation("mesh_paths", "at least one mesh is required");
  if (c.background_paths.empty()) {
    fail_validation("background_paths", "at least one background image is required");
  }
  for (double v : c.color_mean) {
    if (!(v >= 0.0 && v <= 255.0)) fail_validation("color.mean", "components must lie in [0, 255]");
  }
  if (!(c.color_std >= 0.0) || !std::isfinite(c.color_std)) {
    fail_validation("color.std", "must be >= 0");
  }
  if (!(c.size_mean.length > 0.0 && c.size_mean.width > 0.0) ||
      !std::isfinite(c.size_mean.length) || !std::isfinite(c.size_mean.width)) {
    fail_validation("size.mean", "components must be > 0");
  }
  if (!(c.size_std >= 0.0) || !std::isfinite(c.size_std)) {
    fail_validation("size.std", "must be >= 0");
  }
  check_bounds(c.solar_elevation, 0.0, 90.0, "solar.elevation");
  check_bounds(c.solar_azimuth, 0.0, 360.0, "solar.azimuth");
  check_bounds(c.solar_intensity, 0.0, std::numeric_limits<double>::max(), "solar.intensity");
  if (!(c.density > 0.0) || !std::isfinite(c.density)) fail_validation("scene.density", "must be > 0");
  if (!(c.gsd > 0.0) || !std::isfinite(c.gsd)) fail_validation("scene.gsd", "must be > 0");
  if (!(c.ambient >= 0.0 && c.ambient < 1.0)) fail_validation("scene.ambient", "must lie in [0, 1)");
  if (c.patch_size <= 0) fail_validation("dataset.patch_size", "must be > 0");
  if (c.num_patches <= 0) fail_validation("dataset.num_patches", "must be > 0");
  if (!(c.min_visibility > 0.0 && c.min_visibility <= 1.0)) {
    fail_validation("dataset.min_visibility", "must lie in (0, 1]");
  }
}

DesignConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(where(e.mark) + e.msg);
  }
  if (!root || root.IsNull()) {
    throw ParseError("configuration document is empty");
  }
  check_keys(root, "",
             {"class_id", "master_seed", "mesh_paths", "background_paths", "color", "size", "solar",
              "scene", "dataset"});

  DesignConfig c;
  c.class_id = scalar<int>(required(root, "class_id", "class_id"), "class_id");
  c.master_seed =
      scalar<std::uint64_t>(required(root, "master_seed", "master_seed"), "master_seed");
  c.mesh_paths = path_list(required(root, "mesh_paths", "mesh_paths"), "mesh_paths", base_dir);
  c.background_paths =
      path_list(required(root, "background_paths", "background_paths"), "background_paths", base_dir);

  const YAML::Node color = required(root, "color", "color");
  check_keys(color, "color", {"mean", "std"});
  c.color_mean = fixed_vector<3>(required(color, "mean", "color.mean"), "color.mean");
  c.color_std = scalar<double>(required(color, "std", "color.std"), "color.std");

  const YAML::Node size = required(root, "size", "size");
  check_keys(size, "size", {"mean", "std"});
  const auto size_mean = fixed_vector<2>(required(size, "mean", "size.mean"), "size.mean");
  c.size_mean = {size_mean[0], size_mean[1]};
  c.size_std = scalar<double>(required(size, "std", "size.std"), "size.std");

  const YAML::Node solar = required(root, "solar", "solar");
  check_keys(solar, "solar", {"elevation", "azimuth", "intensity"});
  c.solar_elevation = bounds(required(solar, "elevation", "solar.elevation"), "solar.elevation");
  c.solar_azimuth = bounds(required(solar, "azimuth", "solar.azimuth"), "solar.azimuth");
  c.solar_intensity = bounds(required(solar, "intensity", "solar.intensity"), "solar.intensity");

  if (const YAML::Node scene = root["scene"]) {
    check_keys(scene, "scene", {"density", "gsd", "ambient"});
    if (scene["density"]) c.density = scalar<double>(scene["density"], "scene.density");
    if (scene["gsd"]) c.gsd = scalar<double>(scene["gsd"], "scene.gsd");
    if (scene["ambient"]) c.ambient = scalar<double>(scene["ambient"], "scene.ambient");
  }
  if (const YAML::Node dataset = root["dataset"]) {
    check_keys(dataset, "dataset", {"patch_size", "num_patches", "min_visibility"});
    if (dataset["patch_size"]) {
      c.patch_size = scalar<int>(dataset["patch_size"], "dataset.patch_size");
    }
    if (dataset["num_patches"]) {
      c.num_patches = scalar<int>(dataset["num_patches"], "dataset.num_patches");
    }
    if (dataset["min_visibility"]) {
      c.min_visibility = scalar<double>(dataset["min_visibility"], "dataset.min_visibility");
    }
  }

  validate(c);
  return c;
}

DesignConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open configuration file '" + path.string() + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), path.parent_path());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

YAML::Node config_to_yaml(const DesignConfig& c) {
  YAML::Node root;
  root["class_id"] = c.class_id;
  root["master_seed"] = c.master_seed;
  for (const auto& p : c.mesh_paths) root["mesh_paths"].push_back(p.string());
  for (const auto& p : c.background_paths) root["background_paths"].push_back(p.string());
  root["color"]["mean"] = flow_seq({c.color_mean[0], c.color_mean[1], c.color_mean[2]});
  root["color"]["std"] = c.color_std;
  root["size"]["mean"] = flow_seq({c.size_mean.length, c.size_mean.width});
  root["size"]["std"] = c.size_std;
  root["solar"]["elevation"] = flow_seq({c.solar_elevation.lower, c.solar_elevation.upper});
  root["solar"]["azimuth"] = flow_seq({c.solar_azimuth.lower, c.solar_azimuth.upper});
  root["solar"]["intensity"] = flow_seq({c.solar_intensity.lower, c.solar_intensity.upper});
  root["scene"]["density"] = c.density;
  root["scene"]["gsd"] = c.gsd;
  root["scene"]["ambient"] = c.ambient;
  root["dataset"]["patch_size"] = c.patch_size;
  root["dataset"]["num_patches"] = c.num_patches;
  root["dataset"]["min_visibility"] = c.min_visibility;
  return root;
}

std::string serialize_config(const DesignConfig& config) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << config_to_yaml(config);
  return std::string(out.c_str()) + "\n";
}

TargetEstimates estimate_target_params(std::span<const SizePx> size_samples,
                                       std::span<const Rgb> color_samples) {
  if (size_samples.size() < 2) {
    throw ValidationError("size samples: at least 2 measurements are required");
  }
  if (color_samples.size() < 2) {
    throw ValidationError("color samples: at least 2 measurements are required");
  }
  TargetEstimates est;

  std::vector<double> lengths;
  std::vector<double> widths;
  for (const auto& s : size_samples) {
    lengths.push_back(s.length);
    widths.push_back(s.width);
  }
  const double size_dof = 2.0 * static_cast<double>(size_samples.size() - 1);
  const double size_ss = sample_variance_sum(lengths, est.size_mean.length) +
                         sample_variance_sum(widths, est.size_mean.width);
  est.size_std = std::sqrt(size_ss / size_dof);

  double color_ss = 0.0;
  for (std::size_t ch = 0; ch < 3; ++ch) {
    std::vector<double> channel;
    for (const auto& rgb : color_samples) channel.push_back(rgb[ch]);
    color_ss += sample_variance_sum(channel, est.color_mean[ch]);
  }
  est.color_std = std::sqrt(color_ss / (3.0 * static_cast<double>(color_samples.size() - 1)));
  return est;
}

SolarBounds estimate_solar_bounds(std::span<const SolarObservation> observations) {
  if (observations.empty()) {
    throw ValidationError("solar observations: at least one observation is required");
  }
  SolarBounds out{{observations[0].elevation, observations[0].elevation},
                  {observations[0].azimuth, observations[0].azimuth},
                  {observations[0].intensity, observations[0].intensity}};
  auto widen = [](Bounds& b, double v) {
    b.lower = std::min(b.lower, v);
    b.upper = std::max(b.upper, v);
  };
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto& o = observations[i];
    const std::string tag = "solar observation " + std::to_string(i);
    if (!(o.elevation >= 0.0 && o.elevation <= 90.0)) {
      throw ValidationError(tag + ": elevation must lie in [0, 90] degrees");
    }
    if (!(o.azimuth >= 0.0 && o.azimuth <= 360.0)) {
      throw ValidationError(tag + ": azimuth must lie in [0, 360] degrees");
    }
    if (!(o.intensity >= 0.0) || !std::isfinite(o.intensity)) {
      throw ValidationError(tag + ": intensity must be >= 0");
    }
    widen(out.elevation, o.elevation);
    widen(out.azimuth, o.azimuth);
    widen(out.intensity, o.intensity);
  }
  return out;
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  if (name == "color_mean") return SweepParameter::kColorMean;
  if (name == "size_mean") return SweepParameter::kSizeMean;
  if (name == "num_patches") return SweepParameter::kNumPatches;
  throw ValidationError("sweep parameter must be one of color_mean, size_mean, num_patches (got '" +
                        std::string(name) + "')");
}

std::string_view to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::kColorMean:
      return "color_mean";
    case SweepParameter::kSizeMean:
      return "size_mean";
    case SweepParameter::kNumPatches:
      return "num_patches";
  }
  return "unknown";
}

std::vector<DesignConfig> make_sweep_configs(const DesignConfig& base, SweepParameter parameter,
                                             std::span<const double> offsets) {
  std::vector<DesignConfig> out;
  out.reserve(offsets.size());
  for (double offset : offsets) {
    DesignConfig c = base;
    if (parameter == SweepParameter::kNumPatches) {
      if (!(offset > 0.0) || offset != std::floor(offset)) {
        throw ValidationError("num_patches sweep values must be positive integers");
      }
      c.num_patches = static_cast<int>(offset);
    } else {
      if (!(offset > -100.0) || !std::isfinite(offset)) {
        throw ValidationError("percentage offsets must be greater than -100");
      }
      const double factor = 1.0 + offset / 100.0;
      if (parameter == SweepParameter::kColorMean) {
        for (double& ch : c.color_mean) ch = std::clamp(ch * factor, 0.0, 255.0);
      } else {
        c.size_mean.length *= factor;
        c.size_mean.width *= factor;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace simpl
