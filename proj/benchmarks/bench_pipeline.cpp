#include <benchmark/benchmark.h>

#include <filesystem>

#include "simpl/config.hpp"
#include "simpl/dataset.hpp"
#include "simpl/groundtruth.hpp"
#include "simpl/metrics.hpp"
#include "simpl/pipeline.hpp"
#include "simpl/renderer.hpp"
#include "simpl/scene.hpp"

namespace {

using namespace simpl;

const DesignConfig& config() {
  static const DesignConfig c =
      load_config(std::filesystem::path(SIMPL_BENCH_ASSET_DIR) / "configs" / "class1.yaml");
  return c;
}

const Assets& assets() {
  static const Assets a = Assets::load(config());
  return a;
}

// Square world of `side_m` meters on a tiled background.
std::shared_ptr<const RasterImage> ground(double side_m) {
  const int side = raster_extent(side_m, config().gsd);
  RasterImage g = repeat_texture(*assets().backgrounds[0], side, side);
  g.gsd = config().gsd;
  return std::make_shared<const RasterImage>(std::move(g));
}

void BM_BuildScene(benchmark::State& state) {
  const auto bg = ground(static_cast<double>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(build_scene(config(), i++, assets().meshes, bg));
}
BENCHMARK(BM_BuildScene)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_RenderRgb(benchmark::State& state) {
  const Scene scene = build_scene(config(), 0, assets().meshes, ground(static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(render_rgb(scene));
  state.SetItemsProcessed(state.iterations() * scene.width_px() * scene.height_px());
}
BENCHMARK(BM_RenderRgb)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_RenderGt(benchmark::State& state) {
  const Scene scene = build_scene(config(), 0, assets().meshes, ground(static_cast<double>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(render_gt(scene));
}
BENCHMARK(BM_RenderGt)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ExtractBoxes(benchmark::State& state) {
  const Scene scene = build_scene(config(), 0, assets().meshes, ground(1000));
  const RasterImage gt = render_gt(scene);
  for (auto _ : state) benchmark::DoNotOptimize(extract_boxes(gt, config().class_id));
}
BENCHMARK(BM_ExtractBoxes)->Unit(benchmark::kMillisecond);

void BM_TileImage(benchmark::State& state) {
  const Scene scene = build_scene(config(), 0, assets().meshes, ground(1000));
  const RasterImage rgb = render_rgb(scene);
  const auto boxes = extract_boxes(render_gt(scene), config().class_id);
  for (auto _ : state)
    benchmark::DoNotOptimize(tile_image(rgb, boxes, config().patch_size, config().min_visibility));
}
BENCHMARK(BM_TileImage)->Unit(benchmark::kMillisecond);

void BM_Ap50(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::vector<Annotation> gt;
  std::vector<Detection> det;
  for (int i = 0; i < n; ++i) {
    gt.push_back({1, {(i % 100) * 30, (i / 100) * 30, 20, 20}, "img"});
    det.push_back({"img", 1, {(i % 100) * 30 + i % 5, (i / 100) * 30, 20, 20}, (i % 97) / 97.0});
  }
  for (auto _ : state) benchmark::DoNotOptimize(ap50(det, gt));
}
BENCHMARK(BM_Ap50)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
