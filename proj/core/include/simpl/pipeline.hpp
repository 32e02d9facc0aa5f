#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "simpl/config.hpp"
#include "simpl/dataset.hpp"
#include "simpl/groundtruth.hpp"
#include "simpl/image.hpp"
#include "simpl/mesh.hpp"
#include "simpl/scene.hpp"

namespace simpl {

// Meshes and background tiles named by a config, loaded once and shared
// read-only by every worker.
struct Assets {
  std::shared_ptr<const std::vector<Mesh>> meshes;
  std::vector<std::shared_ptr<const RasterImage>> backgrounds;
  std::vector<std::string> warnings;

  static Assets load(const DesignConfig& config);
};

// Everything produced for one virtual world.
struct WorldResult {
  std::string image_id;
  Scene scene;
  RasterImage rgb;
  RasterImage gt;
  std::vector<Annotation> annotations;
  std::vector<std::string> warnings;
};

// World i uses background i mod (number of backgrounds).
WorldResult generate_world(const DesignConfig& config, const Assets& assets, std::size_t world_index);

struct GenerateOptions {
  unsigned workers = 1;
  // Also write world/{class}_{index:05}.png and _gt.png renders.
  bool save_world = false;
  // Called from worker threads once per finished world.
  std::function<void(const WorldRecord&)> on_world;
};

// Number of worlds needed so that tiling yields at least num_patches patches.
std::size_t worlds_needed(const DesignConfig& config, const Assets& assets);

// Full pipeline: scene -> RGB + GT render -> boxes -> tiles -> export. Writes
// exactly config.num_patches patches plus manifest.yaml. Output is identical
// for every worker count.
DatasetManifest generate_dataset(const DesignConfig& config, const Assets& assets,
                                 const std::filesystem::path& out_dir,
                                 const GenerateOptions& options = {});

}  // namespace simpl
