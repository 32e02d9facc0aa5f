#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "simpl/config.hpp"
#include "simpl/groundtruth.hpp"
#include "simpl/image.hpp"
#include "simpl/sampler.hpp"

namespace simpl {

inline constexpr int kManifestFormatVersion = 1;
inline constexpr int kAnnotationFormatVersion = 1;

struct PatchOrigin {
  std::string world_image_id;
  int x_offset = 0;
  int y_offset = 0;
};

struct Patch {
  RasterImage image;
  std::vector<Annotation> annotations;  // patch pixel coordinates
  PatchOrigin origin;
  int rotation_deg = 0;
};

// Grid offsets along one axis: stride patch_size, with the last tile pulled
// back to end exactly at the image edge.
std::vector<int> tile_offsets(int extent, int patch_size);

// Splits an image into patch_size squares. World boxes are clipped to each
// tile and kept when at least min_visibility of their area survives.
std::vector<Patch> tile_image(const RasterImage& image, std::span<const Annotation> annotations,
                              int patch_size, double min_visibility,
                              const std::string& world_image_id = {});

// Box mapping for a counter-clockwise rotation of a side x side square.
BBox rotate_box(const BBox& box, int side, int angle_deg);

// Rotates a square patch by 90, 180 or 270 degrees counter-clockwise.
Patch rotate_patch(const Patch& patch, int angle_deg);

// Rows of `class_id cx cy w h`, normalised by image width/height, 6 decimals.
std::string format_annotation_file(std::span<const Annotation> annotations, int width, int height);
std::vector<Annotation> parse_annotation_file(std::string_view text, int width, int height,
                                              const std::string& image_id = {});

// "{class_id}_{index:05}"
std::string image_stem(int class_id, std::size_t index);

struct PatchRecord {
  std::string image_file;  // relative to the dataset root
  std::string label_file;
  std::string world_image_id;
  int x_offset = 0;
  int y_offset = 0;
  int rotation_deg = 0;
  std::size_t annotation_count = 0;
};

struct WorldRecord {
  std::size_t image_index = 0;
  std::string background;
  std::uint64_t image_seed = 0;  // derived solar-stream seed, for reproduction
  std::size_t instance_count = 0;
  SolarParams solar;
};

struct DatasetManifest {
  std::optional<DesignConfig> config;  // absent for datasets tiled from existing renders
  std::string tool_version;
  std::string started_at;
  std::string finished_at;
  std::vector<WorldRecord> worlds;
  std::vector<PatchRecord> patches;
  std::vector<std::string> warnings;
};

// Writes images/<stem>.png and labels/<stem>.txt for each patch, numbering
// from first_index. Patches without boxes still get an (empty) label file.
std::vector<PatchRecord> write_patches(std::span<const Patch> patches,
                                       const std::filesystem::path& out_dir, int class_id,
                                       std::size_t first_index);

std::string manifest_to_yaml(const DatasetManifest& manifest);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& out_dir);
DatasetManifest read_manifest(const std::filesystem::path& path);

// write_patches + manifest.yaml at the root.
DatasetManifest export_dataset(std::span<const Patch> patches, const std::filesystem::path& out_dir,
                               const DesignConfig& config);

std::string utc_timestamp();

}  // namespace simpl
