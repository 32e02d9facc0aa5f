#include "simpl/pipeline.hpp"

#include <atomic>
#include <exception>
#include <string_view>
#include <thread>

#include "simpl/errors.hpp"
#include "simpl/image_io.hpp"
#include "simpl/renderer.hpp"
#include "simpl/sampler.hpp"

namespace simpl {

namespace {

std::size_t patches_per_world(const RasterImage& background, int patch_size) {
  return tile_offsets(background.width, patch_size).size() *
         tile_offsets(background.height, patch_size).size();
}

WorldRecord make_record(const DesignConfig& config, const WorldResult& world) {
  WorldRecord rec;
  rec.image_index = world.scene.image_index;
  rec.background =
      config.background_paths[world.scene.image_index % config.background_paths.size()].string();
  rec.image_seed =
      RngStream::derive_seed(config.master_seed, StreamPurpose::kSolar, world.scene.image_index);
  rec.instance_count = world.scene.instances.size();
  rec.solar = world.scene.solar;
  return rec;
}

}  // namespace

Assets Assets::load(const DesignConfig& config) {
  Assets assets;
  auto meshes = std::make_shared<std::vector<Mesh>>();
  for (const auto& path : config.mesh_paths) {
    meshes->push_back(load_mesh(path, &assets.warnings));
  }
  assets.meshes = std::move(meshes);
  for (const auto& path : config.background_paths) {
    RasterImage bg = read_png(path, config.gsd);
    if (bg.channels == 1) {
      RasterImage rgb(bg.width, bg.height, 3, bg.gsd);
      for (std::size_t i = 0; i < bg.pixels.size(); ++i) {
        rgb.pixels[i * 3] = rgb.pixels[i * 3 + 1] = rgb.pixels[i * 3 + 2] = bg.pixels[i];
      }
      bg = std::move(rgb);
    }
    assets.backgrounds.push_back(std::make_shared<const RasterImage>(std::move(bg)));
  }
  return assets;
}

WorldResult generate_world(const DesignConfig& config, const Assets& assets,
                           std::size_t world_index) {
  if (assets.backgrounds.empty()) throw ValidationError("no background images loaded");
  WorldResult world;
  world.image_id = image_stem(config.class_id, world_index);
  world.scene = build_scene(config, world_index, assets.meshes,
                            assets.backgrounds[world_index % assets.backgrounds.size()]);
  if (ShadingModel::from_solar(world.scene.solar, config.ambient).elevation_clamped) {
    world.warnings.push_back(world.image_id + ": solar elevation " +
                             std::to_string(world.scene.solar.elevation_deg) +
                             " deg raised to the 1 deg shadow minimum");
  }
  world.rgb = render_rgb(world.scene);
  world.gt = render_gt(world.scene);
  world.annotations = extract_boxes(world.gt, config.class_id, world.image_id);
  return world;
}

std::size_t worlds_needed(const DesignConfig& config, const Assets& assets) {
  if (assets.backgrounds.empty()) throw ValidationError("no background images loaded");
  std::size_t total = 0;
  std::size_t worlds = 0;
  while (total < static_cast<std::size_t>(config.num_patches)) {
    total += patches_per_world(*assets.backgrounds[worlds % assets.backgrounds.size()],
                               config.patch_size);
    ++worlds;
  }
  return worlds;
}

DatasetManifest generate_dataset(const DesignConfig& config, const Assets& assets,
                                 const std::filesystem::path& out_dir,
                                 const GenerateOptions& options) {
  validate(config);
  DatasetManifest manifest;
  manifest.config = config;
  manifest.tool_version = SIMPL_VERSION;
  manifest.started_at = utc_timestamp();
  manifest.warnings = assets.warnings;

  const std::size_t world_count = worlds_needed(config, assets);
  std::vector<std::size_t> first_patch(world_count + 1, 0);
  for (std::size_t i = 0; i < world_count; ++i) {
    first_patch[i + 1] =
        first_patch[i] +
        patches_per_world(*assets.backgrounds[i % assets.backgrounds.size()], config.patch_size);
  }
  const auto limit = static_cast<std::size_t>(config.num_patches);

  struct Slot {
    WorldRecord world;
    std::vector<PatchRecord> patches;
    std::vector<std::string> warnings;
    std::exception_ptr error;
  };
  std::vector<Slot> slots(world_count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= world_count || failed.load()) return;
      Slot& slot = slots[i];
      try {
        WorldResult world = generate_world(config, assets, i);
        if (options.save_world) {
          const auto dir = out_dir / "world";
          write_png(dir / (world.image_id + ".png"), world.rgb);
          write_png(dir / (world.image_id + "_gt.png"), world.gt);
        }
        std::vector<Patch> patches = tile_image(world.rgb, world.annotations, config.patch_size,
                                                config.min_visibility, world.image_id);
        const std::size_t keep = std::min(patches.size(), limit - first_patch[i]);
        patches.resize(keep);
        slot.patches = write_patches(patches, out_dir, config.class_id, first_patch[i]);
        slot.world = make_record(config, world);
        slot.warnings = std::move(world.warnings);
        if (options.on_world) options.on_world(slot.world);
      } catch (...) {
        slot.error = std::current_exception();
        failed.store(true);
      }
    }
  };

  std::error_code ec;
  for (const char* sub : {"images", "labels", "world"}) {
    if (std::string_view(sub) == "world" && !options.save_world) continue;
    std::filesystem::create_directories(out_dir / sub, ec);
    if (ec) throw IoError("cannot create directory '" + (out_dir / sub).string() + "': " + ec.message());
  }

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers,
                                                           static_cast<unsigned>(world_count)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (Slot& slot : slots) {
    if (slot.error) std::rethrow_exception(slot.error);
  }
  for (Slot& slot : slots) {
    manifest.worlds.push_back(slot.world);
    manifest.warnings.insert(manifest.warnings.end(), slot.warnings.begin(), slot.warnings.end());
    manifest.patches.insert(manifest.patches.end(), slot.patches.begin(), slot.patches.end());
  }
  manifest.finished_at = utc_timestamp();
  write_manifest(manifest, out_dir);
  return manifest;
}

}  // namespace simpl
