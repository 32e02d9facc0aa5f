#include "simpl/dataset.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <tuple>

#include "simpl/errors.hpp"
#include "simpl/image_io.hpp"

namespace simpl {

namespace {

void sort_annotations(std::vector<Annotation>& annotations) {
  std::sort(annotations.begin(), annotations.end(), [](const Annotation& a, const Annotation& b) {
    return std::tie(a.bbox.y, a.bbox.x, a.bbox.h, a.bbox.w, a.class_id) <
           std::tie(b.bbox.y, b.bbox.x, b.bbox.h, b.bbox.w, b.class_id);
  });
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
}

}  // namespace

std::vector<int> tile_offsets(int extent, int patch_size) {
  if (patch_size <= 0) throw ValidationError("patch size must be > 0");
  if (patch_size > extent) {
    throw ValidationError("patch size " + std::to_string(patch_size) + " exceeds image extent " +
                          std::to_string(extent));
  }
  std::vector<int> offsets;
  for (int o = 0; o + patch_size <= extent; o += patch_size) offsets.push_back(o);
  if (offsets.back() + patch_size < extent) offsets.push_back(extent - patch_size);
  return offsets;
}

std::vector<Patch> tile_image(const RasterImage& image, std::span<const Annotation> annotations,
                              int patch_size, double min_visibility,
                              const std::string& world_image_id) {
  if (!(min_visibility > 0.0 && min_visibility <= 1.0)) {
    throw ValidationError("min_visibility must lie in (0, 1]");
  }
  const std::vector<int> xs = tile_offsets(image.width, patch_size);
  const std::vector<int> ys = tile_offsets(image.height, patch_size);
  std::vector<Patch> patches;
  patches.reserve(xs.size() * ys.size());
  for (int oy : ys) {
    for (int ox : xs) {
      Patch patch;
      patch.image = crop(image, ox, oy, patch_size, patch_size);
      patch.origin = {world_image_id, ox, oy};
      for (const Annotation& a : annotations) {
        const int x0 = std::max(a.bbox.x, ox);
        const int y0 = std::max(a.bbox.y, oy);
        const int x1 = std::min(a.bbox.x + a.bbox.w, ox + patch_size);
        const int y1 = std::min(a.bbox.y + a.bbox.h, oy + patch_size);
        if (x1 <= x0 || y1 <= y0 || a.bbox.area() <= 0) continue;
        const BBox clipped{x0 - ox, y0 - oy, x1 - x0, y1 - y0};
        const double visible =
            static_cast<double>(clipped.area()) / static_cast<double>(a.bbox.area());
        if (visible >= min_visibility) {
          patch.annotations.push_back({a.class_id, clipped, a.image_id});
        }
      }
      sort_annotations(patch.annotations);
      patches.push_back(std::move(patch));
    }
  }
  return patches;
}

BBox rotate_box(const BBox& b, int side, int angle_deg) {
  switch (angle_deg) {
    case 0:
      return b;
    case 90:
      return {b.y, side - b.x - b.w, b.h, b.w};
    case 180:
      return {side - b.x - b.w, side - b.y - b.h, b.w, b.h};
    case 270:
      return {side - b.y - b.h, b.x, b.h, b.w};
    default:
      throw ValidationError("rotation angle must be one of 90, 180, 270 (got " +
                            std::to_string(angle_deg) + ")");
  }
}

Patch rotate_patch(const Patch& patch, int angle_deg) {
  if (angle_deg != 90 && angle_deg != 180 && angle_deg != 270) {
    throw ValidationError("rotation angle must be one of 90, 180, 270 (got " +
                          std::to_string(angle_deg) + ")");
  }
  if (patch.image.width != patch.image.height) {
    throw ValidationError("rotate_patch: patch must be square");
  }
  const int side = patch.image.width;
  Patch out;
  out.image = rotate_ccw(patch.image, angle_deg / 90);
  out.origin = patch.origin;
  out.rotation_deg = (patch.rotation_deg + angle_deg) % 360;
  out.annotations.reserve(patch.annotations.size());
  for (const Annotation& a : patch.annotations) {
    out.annotations.push_back({a.class_id, rotate_box(a.bbox, side, angle_deg), a.image_id});
  }
  sort_annotations(out.annotations);
  return out;
}

std::string format_annotation_file(std::span<const Annotation> annotations, int width, int height) {
  std::string text;
  char row[128];
  const double w = width;
  const double h = height;
  for (const Annotation& a : annotations) {
    std::snprintf(row, sizeof(row), "%d %.6f %.6f %.6f %.6f\n", a.class_id,
                  (a.bbox.x + 0.5 * a.bbox.w) / w, (a.bbox.y + 0.5 * a.bbox.h) / h, a.bbox.w / w,
                  a.bbox.h / h);
    text += row;
  }
  return text;
}

std::vector<Annotation> parse_annotation_file(std::string_view text, int width, int height,
                                              const std::string& image_id) {
  std::vector<Annotation> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    int class_id = 0;
    double cx = 0, cy = 0, nw = 0, nh = 0;
    if (!(row >> class_id >> cx >> cy >> nw >> nh)) {
      throw ParseError(image_id + ": line " + std::to_string(line_no) +
                       ": expected 'class_id cx cy w h'");
    }
    Annotation a;
    a.class_id = class_id;
    a.image_id = image_id;
    a.bbox.w = static_cast<int>(std::lround(nw * width));
    a.bbox.h = static_cast<int>(std::lround(nh * height));
    a.bbox.x = static_cast<int>(std::lround(cx * width - 0.5 * a.bbox.w));
    a.bbox.y = static_cast<int>(std::lround(cy * height - 0.5 * a.bbox.h));
    out.push_back(a);
  }
  return out;
}

std::string image_stem(int class_id, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%d_%05zu", class_id, index);
  return buf;
}

std::vector<PatchRecord> write_patches(std::span<const Patch> patches,
                                       const std::filesystem::path& out_dir, int class_id,
                                       std::size_t first_index) {
  ensure_dir(out_dir / "images");
  ensure_dir(out_dir / "labels");
  std::vector<PatchRecord> records;
  records.reserve(patches.size());
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const Patch& p = patches[i];
    const std::string stem = image_stem(class_id, first_index + i);
    PatchRecord rec;
    rec.image_file = "images/" + stem + ".png";
    rec.label_file = "labels/" + stem + ".txt";
    rec.world_image_id = p.origin.world_image_id;
    rec.x_offset = p.origin.x_offset;
    rec.y_offset = p.origin.y_offset;
    rec.rotation_deg = p.rotation_deg;
    rec.annotation_count = p.annotations.size();
    write_png(out_dir / rec.image_file, p.image);
    write_text(out_dir / rec.label_file,
               format_annotation_file(p.annotations, p.image.width, p.image.height));
    records.push_back(std::move(rec));
  }
  return records;
}

std::string manifest_to_yaml(const DatasetManifest& m) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "format_version" << YAML::Value << kManifestFormatVersion;
  out << YAML::Key << "annotation_format_version" << YAML::Value << kAnnotationFormatVersion;
  out << YAML::Key << "tool_version" << YAML::Value << m.tool_version;
  if (m.config) out << YAML::Key << "master_seed" << YAML::Value << m.config->master_seed;
  out << YAML::Key << "started_at" << YAML::Value << m.started_at;
  out << YAML::Key << "finished_at" << YAML::Value << m.finished_at;
  if (m.config) out << YAML::Key << "config" << YAML::Value << config_to_yaml(*m.config);

  out << YAML::Key << "warnings" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : m.warnings) out << w;
  out << YAML::EndSeq;

  out << YAML::Key << "worlds" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : m.worlds) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "index" << YAML::Value << w.image_index;
    out << YAML::Key << "background" << YAML::Value << w.background;
    out << YAML::Key << "seed" << YAML::Value << w.image_seed;
    out << YAML::Key << "instances" << YAML::Value << w.instance_count;
    out << YAML::Key << "elevation" << YAML::Value << w.solar.elevation_deg;
    out << YAML::Key << "azimuth" << YAML::Value << w.solar.azimuth_deg;
    out << YAML::Key << "intensity" << YAML::Value << w.solar.intensity;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "patches" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : m.patches) {
    out << YAML::Flow << YAML::BeginMap;
    out << YAML::Key << "image" << YAML::Value << p.image_file;
    out << YAML::Key << "labels" << YAML::Value << p.label_file;
    out << YAML::Key << "world" << YAML::Value << p.world_image_id;
    out << YAML::Key << "x" << YAML::Value << p.x_offset;
    out << YAML::Key << "y" << YAML::Value << p.y_offset;
    out << YAML::Key << "rotation" << YAML::Value << p.rotation_deg;
    out << YAML::Key << "annotations" << YAML::Value << p.annotation_count;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& out_dir) {
  ensure_dir(out_dir);
  write_text(out_dir / "manifest.yaml", manifest_to_yaml(manifest));
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  DatasetManifest m;
  try {
    const YAML::Node root = YAML::Load(text.str());
    m.tool_version = root["tool_version"].as<std::string>();
    m.started_at = root["started_at"].as<std::string>("");
    m.finished_at = root["finished_at"].as<std::string>("");
    if (root["config"]) {
      YAML::Emitter cfg;
      cfg.SetDoublePrecision(17);
      cfg << root["config"];
      m.config = parse_config(cfg.c_str());
    }
    for (const auto& w : root["warnings"]) m.warnings.push_back(w.as<std::string>());
    for (const auto& w : root["worlds"]) {
      WorldRecord r;
      r.image_index = w["index"].as<std::size_t>();
      r.background = w["background"].as<std::string>();
      r.image_seed = w["seed"].as<std::uint64_t>();
      r.instance_count = w["instances"].as<std::size_t>();
      r.solar = {w["elevation"].as<double>(), w["azimuth"].as<double>(), w["intensity"].as<double>()};
      m.worlds.push_back(std::move(r));
    }
    for (const auto& p : root["patches"]) {
      PatchRecord r;
      r.image_file = p["image"].as<std::string>();
      r.label_file = p["labels"].as<std::string>();
      r.world_image_id = p["world"].as<std::string>();
      r.x_offset = p["x"].as<int>();
      r.y_offset = p["y"].as<int>();
      r.rotation_deg = p["rotation"].as<int>();
      r.annotation_count = p["annotations"].as<std::size_t>();
      m.patches.push_back(std::move(r));
    }
  } catch (const YAML::Exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return m;
}

DatasetManifest export_dataset(std::span<const Patch> patches, const std::filesystem::path& out_dir,
                               const DesignConfig& config) {
  DatasetManifest m;
  m.config = config;
  m.tool_version = SIMPL_VERSION;
  m.started_at = utc_timestamp();
  m.patches = write_patches(patches, out_dir, config.class_id, 0);
  m.finished_at = utc_timestamp();
  write_manifest(m, out_dir);
  return m;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace simpl
