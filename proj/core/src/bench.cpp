#include "simpl/bench.hpp"

#include <yaml-cpp/yaml.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <optional>
#include <random>
#include <thread>

#include "simpl/dataset.hpp"
#include "simpl/errors.hpp"
#include "simpl/groundtruth.hpp"
#include "simpl/renderer.hpp"
#include "simpl/scene.hpp"

namespace simpl {

namespace {

class ScratchDir {
 public:
  ScratchDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("simpl-bench-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace

std::string hardware_note() {
  std::string model = "unknown cpu";
  std::ifstream cpuinfo("/proc/cpuinfo");
  std::string line;
  while (std::getline(cpuinfo, line)) {
    if (line.rfind("model name", 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) model = line.substr(colon + 2);
      break;
    }
  }
  return model + ", " + std::to_string(std::thread::hardware_concurrency()) + " hardware threads";
}

BenchResult run_bench(const DesignConfig& config, const Assets& assets, double km2,
                      const BenchOptions& options) {
  validate(config);
  if (!(km2 >= 1.0) || !std::isfinite(km2)) {
    throw ValidationError("bench: km2 must be >= 1");
  }
  if (assets.backgrounds.empty()) throw ValidationError("bench: no background images loaded");

  const auto worlds = static_cast<std::size_t>(std::ceil(km2 - 1e-9));
  const double side_m = std::sqrt(km2 / static_cast<double>(worlds)) * 1000.0;
  const int side_px = raster_extent(side_m, config.gsd);
  if (side_px < config.patch_size) {
    throw ValidationError("bench: world side is smaller than the patch size");
  }

  std::vector<std::shared_ptr<const RasterImage>> grounds;
  for (std::size_t i = 0; i < worlds; ++i) {
    RasterImage g =
        repeat_texture(*assets.backgrounds[i % assets.backgrounds.size()], side_px, side_px);
    g.gsd = config.gsd;
    grounds.push_back(std::make_shared<const RasterImage>(std::move(g)));
  }

  std::optional<ScratchDir> scratch;
  std::filesystem::path out_dir = options.out_dir;
  if (out_dir.empty()) {
    scratch.emplace();
    out_dir = scratch->path();
  }
  std::filesystem::create_directories(out_dir / "images");
  std::filesystem::create_directories(out_dir / "labels");

  std::vector<std::size_t> instance_counts(worlds, 0);
  std::vector<std::exception_ptr> errors(worlds);
  std::atomic<std::size_t> next{0};
  const std::size_t per_world = tile_offsets(side_px, config.patch_size).size() *
                                tile_offsets(side_px, config.patch_size).size();

  const auto start = std::chrono::steady_clock::now();
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= worlds) return;
      try {
        const Scene scene = build_scene(config, i, assets.meshes, grounds[i]);
        const RasterImage rgb = render_rgb(scene);
        const RasterImage gt = render_gt(scene);
        const std::string id = image_stem(config.class_id, i);
        const std::vector<Annotation> boxes = extract_boxes(gt, config.class_id, id);
        const std::vector<Patch> patches =
            tile_image(rgb, boxes, config.patch_size, config.min_visibility, id);
        write_patches(patches, out_dir, config.class_id, i * per_world);
        instance_counts[i] = scene.instances.size();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(worlds)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  const auto stop = std::chrono::steady_clock::now();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  BenchResult result;
  result.worlds = worlds;
  result.workers = workers;
  result.wall_seconds = std::chrono::duration<double>(stop - start).count();
  const double world_km2 = std::pow(side_px * config.gsd, 2) / 1.0e6;
  result.km2_generated = world_km2 * static_cast<double>(worlds);
  result.seconds_per_km2 = result.wall_seconds / result.km2_generated;
  result.objects_per_km2 = static_cast<int>(std::lround(config.density));
  for (std::size_t n : instance_counts) result.instances += n;
  result.hardware = hardware_note();
  result.stages = {"build_scene", "render_rgb", "render_gt", "extract_boxes", "tile_image",
                   "export"};
  return result;
}

std::string bench_result_to_yaml(const BenchResult& r) {
  YAML::Node node;
  node["km2_generated"] = r.km2_generated;
  node["wall_seconds"] = r.wall_seconds;
  node["seconds_per_km2"] = r.seconds_per_km2;
  node["objects_per_km2"] = r.objects_per_km2;
  node["worlds"] = r.worlds;
  node["instances"] = r.instances;
  node["workers"] = r.workers;
  node["hardware"] = r.hardware;
  for (const auto& s : r.stages) node["stages"].push_back(s);
  YAML::Emitter out;
  out << node;
  return std::string(out.c_str()) + "\n";
}

}  // namespace simpl
