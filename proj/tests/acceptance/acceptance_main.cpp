// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Pass criterion numbers as arguments to run a
// subset, e.g. `simpl_acceptance 3 5`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "simpl/bench.hpp"
#include "simpl/config.hpp"
#include "simpl/dataset.hpp"
#include "simpl/groundtruth.hpp"
#include "simpl/metrics.hpp"
#include "simpl/pipeline.hpp"
#include "simpl/renderer.hpp"
#include "simpl/scene.hpp"
#include "simpl_tools/cli.hpp"

namespace fs = std::filesystem;
using namespace simpl;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

DesignConfig class_config(int k) {
  return load_config(test::asset_dir() / "configs" / ("class" + std::to_string(k) + ".yaml"));
}

std::shared_ptr<const RasterImage> square_ground(const Assets& assets, int side, double gsd,
                                                 std::size_t which = 0) {
  RasterImage g = repeat_texture(*assets.backgrounds[which % assets.backgrounds.size()], side, side);
  g.gsd = gsd;
  return std::make_shared<const RasterImage>(std::move(g));
}

double box_iou(const BBox& b, const Box2& a) {
  const double ix = std::max(0.0, std::min<double>(b.x + b.w, a.max_x) - std::max<double>(b.x, a.min_x));
  const double iy = std::max(0.0, std::min<double>(b.y + b.h, a.max_y) - std::max<double>(b.y, a.min_y));
  const double inter = ix * iy;
  const double uni = static_cast<double>(b.area()) + a.width() * a.height() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

// 1. Extracted boxes match analytic footprint boxes one-to-one.
Verdict ground_truth_fidelity() {
  const auto start = Clock::now();
  DesignConfig c = class_config(1);
  const Assets assets = Assets::load(c);
  const int side = raster_extent(500.0, c.gsd);  // 0.25 km^2
  double worst = 1.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    c.master_seed = 1000 + s;
    const Scene scene = build_scene(c, s, assets.meshes, square_ground(assets, side, c.gsd, s));
    const auto boxes = extract_boxes(render_gt(scene), c.class_id);
    if (scene.instances.size() != 30 || boxes.size() != scene.instances.size()) {
      return {false, fmt("scene %d: %zu instances, %zu boxes", static_cast<int>(s),
                         scene.instances.size(), boxes.size())};
    }
    std::set<std::size_t> claimed;
    for (const auto& b : boxes) {
      std::size_t best = 0;
      double best_iou = -1;
      for (std::size_t i = 0; i < scene.instances.size(); ++i) {
        const double v = box_iou(b.bbox, projected_box_px(scene, scene.instances[i]));
        if (v > best_iou) {
          best_iou = v;
          best = i;
        }
      }
      worst = std::min(worst, best_iou);
      if (best_iou < 0.9 || !claimed.insert(best).second) {
        return {false, fmt("scene %d: box IoU %.3f or duplicate match", static_cast<int>(s), best_iou)};
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {elapsed < 120.0,
          fmt("20 scenes x 30 instances, bijective, min IoU %.4f (>= 0.9), %.1f s (< 120 s)", worst,
              elapsed)};
}

// 2. Exact counts and zero pairwise footprint overlap over 10 km^2.
Verdict density_and_placement() {
  DesignConfig c = class_config(1);
  const Assets assets = Assets::load(c);
  const int side = raster_extent(1000.0, c.gsd);
  std::size_t total = 0, overlaps = 0, outside = 0, miscounts = 0;
  double area = 0;
  for (std::size_t w = 0; w < 10; ++w) {
    const Scene scene = build_scene(c, w, assets.meshes, square_ground(assets, side, c.gsd, w));
    area += scene.area_km2();
    total += scene.instances.size();
    if (scene.instances.size() != target_instance_count(c.density, scene.area_km2())) ++miscounts;
    const Box2 tile{0, 0, scene.width_m(), scene.height_m()};
    for (std::size_t i = 0; i < scene.instances.size(); ++i) {
      if (!contains(tile, scene.instances[i].world_footprint)) ++outside;
      for (std::size_t j = i + 1; j < scene.instances.size(); ++j) {
        overlaps += intersects(scene.instances[i].world_footprint, scene.instances[j].world_footprint);
      }
    }
  }
  const bool ok = miscounts == 0 && overlaps == 0 && outside == 0 &&
                  total == static_cast<std::size_t>(std::llround(120.0 * area));
  return {ok, fmt("%zu instances over %.4f km^2 (round(120*area) = %lld), %zu overlapping pairs, "
                  "%zu outside tile",
                  total, area, std::llround(120.0 * area), overlaps, outside)};
}

// 3. Sampling moments over 10,000 draws.
Verdict sampling_statistics() {
  const auto start = Clock::now();
  const DesignConfig c = class_config(1);
  const int n = 10000;
  RngStream inst(RngStream::derive_seed(c.master_seed, StreamPurpose::kInstance, 0));
  RngStream sun(RngStream::derive_seed(c.master_seed, StreamPurpose::kSolar, 0));
  Rgb color{};
  double len = 0, wid = 0;
  double se_sum[3] = {}, se_sq[3] = {};
  bool in_bounds = true;
  for (int i = 0; i < n; ++i) {
    const InstanceProps p = sample_instance(c, inst);
    for (int k = 0; k < 3; ++k) color[k] += p.color[k] / n;
    len += p.size.length / n;
    wid += p.size.width / n;
    const SolarParams s = sample_solar(c, sun);
    const double v[3] = {s.elevation_deg, s.azimuth_deg, s.intensity};
    const Bounds b[3] = {c.solar_elevation, c.solar_azimuth, c.solar_intensity};
    for (int k = 0; k < 3; ++k) {
      in_bounds = in_bounds && v[k] >= b[k].lower && v[k] <= b[k].upper;
      se_sum[k] += v[k];
      se_sq[k] += v[k] * v[k];
    }
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  double worst_z = 0;
  for (int k = 0; k < 3; ++k) worst_z = std::max(worst_z, std::abs(color[k] - c.color_mean[k]) / (c.color_std / root_n));
  worst_z = std::max(worst_z, std::abs(len - c.size_mean.length) / (c.size_std / root_n));
  worst_z = std::max(worst_z, std::abs(wid - c.size_mean.width) / (c.size_std / root_n));
  bool uniform_ok = true;
  const Bounds b[3] = {c.solar_elevation, c.solar_azimuth, c.solar_intensity};
  for (int k = 0; k < 3; ++k) {
    const double range = b[k].upper - b[k].lower;
    const double sd = range / std::sqrt(12.0);
    const double mean = se_sum[k] / n;
    const double var = se_sq[k] / n - mean * mean;
    const double mz = std::abs(mean - 0.5 * (b[k].lower + b[k].upper)) / (sd / root_n);
    worst_z = std::max(worst_z, mz);
    // Variance of U(a,b) is range^2/12; sampling SE of the variance is range^2 / (sqrt(180 n)).
    uniform_ok = uniform_ok && std::abs(var - sd * sd) <= 3 * range * range / std::sqrt(180.0 * n);
  }
  const double elapsed = seconds_since(start);
  return {worst_z <= 3.0 && in_bounds && uniform_ok && elapsed < 10.0,
          fmt("worst |mean - mu| = %.2f SE (<= 3), solar in bounds: %s, uniform variance ok: %s, "
              "%.2f s (< 10 s)",
              worst_z, in_bounds ? "yes" : "no", uniform_ok ? "yes" : "no", elapsed)};
}

// 4. Shadow length and bearing for a post at 45 degrees elevation.
Verdict shadow_geometry() {
  const double gsd = 0.3, h = 15.0;
  double worst_len = 0, worst_bearing = 0;
  for (double az = 0; az < 360; az += 22.5) {
    const test::ShadowMeasure m = test::measure_post_shadow(h, gsd, 45.0, az);
    worst_len = std::max(worst_len, std::abs(m.length_px - h / gsd));
    worst_bearing = std::max(worst_bearing, test::angle_diff(m.bearing_deg, az + 180.0));
  }
  return {worst_len <= 2.0 && worst_bearing <= 2.0,
          fmt("h = %.0f m, 16 azimuths: max length error %.2f px (<= 2), max bearing error %.2f "
              "deg (<= 2)",
              h, worst_len, worst_bearing)};
}

// 5. 1 km^2 at 0.3 m/px is 3333 px square; a 133 px box is 0.16% of a km^2.
Verdict geometry_constants() {
  DesignConfig c = class_config(1);
  const Assets assets = Assets::load(c);
  const int side = raster_extent(1000.0, c.gsd);
  Scene scene;
  scene.background = square_ground(assets, side, c.gsd);
  scene.meshes = assets.meshes;
  scene.gsd = c.gsd;
  const RasterImage img = render_rgb(scene);
  const BBox det{0, 0, 133, 133};
  const double percent = static_cast<double>(det.area()) * c.gsd * c.gsd / 1.0e6 * 100.0;
  const bool ok = img.width == 3333 && img.height == 3333 && std::abs(percent - 0.16) <= 0.005;
  return {ok, fmt("render %dx%d px, 133x133 px box = %.4f%% of 1 km^2 (0.16 +/- 0.005)", img.width,
                  img.height, percent)};
}

// 6. ap50 / recall_at_fa against brute-force oracles.
Verdict metrics_oracle() {
  std::mt19937_64 rng(6);
  int fixtures = 0, mismatches = 0;
  auto check = [&](const std::vector<Detection>& d, const std::vector<Annotation>& g) {
    ++fixtures;
    if (std::abs(ap50(d, g) - test::ap_oracle(d, g).value()) > 1e-12) ++mismatches;
    for (double area : {0.5, 1.0, 3.0})
      for (double alpha : {0.0, 0.25, 0.5, 1.0, 2.0})
        if (std::abs(recall_at_fa(d, g, area, alpha) - test::recall_at_fa_oracle(d, g, area, alpha).value()) > 1e-12)
          ++mismatches;
  };
  const char* images[] = {"p", "q"};
  for (int t = 0; t < 1000; ++t) {
    std::vector<Annotation> g;
    std::vector<Detection> d;
    const int ng = 1 + static_cast<int>(rng() % 4), nd = static_cast<int>(rng() % 7);
    for (int i = 0; i < ng; ++i)
      g.push_back({1 + static_cast<int>(rng() % 2),
                   {static_cast<int>(rng() % 4) * 5, static_cast<int>(rng() % 3) * 5, 8, 8},
                   images[rng() % 2]});
    for (int i = 0; i < nd; ++i) {
      const Annotation& a = g[rng() % g.size()];
      const BBox b{a.bbox.x + static_cast<int>(rng() % 7) - 3, a.bbox.y + static_cast<int>(rng() % 7) - 3,
                   a.bbox.w + static_cast<int>(rng() % 5) - 2, a.bbox.h + static_cast<int>(rng() % 5) - 2};
      d.push_back({rng() % 6 ? a.image_id : "q", rng() % 6 ? a.class_id : 1, b,
                   static_cast<double>(1 + rng() % 5) / 5.0});
    }
    check(d, g);
  }
  // Worked fixture: TP 0.9, FP 0.8, TP 0.7 against 3 GT.
  const std::vector<Annotation> g3{{1, {0, 0, 10, 10}, "p"}, {1, {50, 0, 10, 10}, "p"}, {1, {100, 0, 10, 10}, "p"}};
  const std::vector<Detection> d3{{"p", 1, {0, 0, 10, 10}, 0.9}, {"p", 1, {200, 0, 10, 10}, 0.8},
                                  {"p", 1, {50, 0, 10, 10}, 0.7}};
  check(d3, g3);
  const bool worked = std::abs(ap50(d3, g3) - 5.0 / 9.0) < 1e-12;
  // Perfect detectors.
  bool perfect = true;
  for (int t = 0; t < 50; ++t) {
    std::vector<Annotation> g;
    std::vector<Detection> d;
    for (int i = 0; i < 1 + t % 5; ++i) {
      g.push_back({1, {i * 20, 0, 10, 10}, "p"});
      d.push_back({"p", 1, {i * 20, 0, 10, 10}, static_cast<double>(rng() % 100) / 100.0});
    }
    perfect = perfect && ap50(d, g) == 1.0;
    for (double alpha : {0.0, 0.25, 1.0, 10.0}) perfect = perfect && recall_at_fa(d, g, 1.0, alpha) == 1.0;
  }
  return {mismatches == 0 && worked && perfect && fixtures >= 100,
          fmt("%d fixtures, %d mismatches vs oracle; 5/9 fixture %s; perfect detector AP=1, R=recall: %s",
              fixtures, mismatches, worked ? "ok" : "WRONG", perfect ? "ok" : "WRONG")};
}

// 7. Rotated annotations equal re-extracted boxes.
Verdict rotation_augmentation() {
  DesignConfig c = class_config(1);
  const Assets assets = Assets::load(c);
  const int side = raster_extent(500.0, c.gsd);
  std::mt19937_64 rng(7);
  int patches = 0, mismatches = 0, boxes = 0;
  for (std::uint64_t w = 0; patches < 50; ++w) {
    const Scene scene = build_scene(c, w, assets.meshes, square_ground(assets, side, c.gsd, w));
    const RasterImage gt = render_gt(scene);
    for (int k = 0; k < 10 && patches < 50; ++k) {
      const int x = static_cast<int>(rng() % static_cast<std::uint64_t>(side - c.patch_size));
      const int y = static_cast<int>(rng() % static_cast<std::uint64_t>(side - c.patch_size));
      Patch p;
      p.image = crop(gt, x, y, c.patch_size, c.patch_size);
      p.annotations = extract_boxes(p.image, c.class_id);
      boxes += static_cast<int>(p.annotations.size());
      for (int angle : {90, 180, 270}) {
        const Patch r = rotate_patch(p, angle);
        if (r.annotations != extract_boxes(r.image, c.class_id)) ++mismatches;
      }
      ++patches;
    }
  }
  return {mismatches == 0,
          fmt("%d GT patches (%d boxes) x 3 angles, %d mismatches", patches, boxes, mismatches)};
}

std::string strip_timestamps(const std::string& manifest) {
  std::istringstream in(manifest);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.rfind("started_at:", 0) == 0 || line.rfind("finished_at:", 0) == 0) continue;
    out += line + "\n";
  }
  return out;
}

// 8. `generate` output is identical across runs and worker counts.
Verdict determinism() {
  test::TempDir dir("accept_det");
  DesignConfig c = class_config(1);
  c.num_patches = 12;
  test::write_file(dir / "c.yaml", serialize_config(c));
  const std::vector<std::pair<std::string, std::string>> runs{{"a", "1"}, {"b", "1"}, {"c", "4"}};
  std::ostringstream sink;
  for (const auto& [name, workers] : runs) {
    const auto outcome = cli::dispatch({"generate", "--config", (dir / "c.yaml").string(), "--out",
                                        (dir / name).string(), "--workers", workers},
                                       sink, sink);
    if (outcome.exit_code != 0) return {false, "generate failed: " + outcome.summary};
  }
  const std::string ref = strip_timestamps(test::read_file(dir / "a" / "manifest.yaml"));
  std::size_t files = 0, diffs = 0;
  for (const auto& [name, workers] : runs) {
    if (strip_timestamps(test::read_file(dir / name / "manifest.yaml")) != ref) ++diffs;
    for (const auto& e : fs::directory_iterator(dir / "a" / "labels")) {
      ++files;
      if (test::read_file(e.path()) != test::read_file(dir / name / "labels" / e.path().filename())) ++diffs;
    }
  }
  return {diffs == 0, fmt("3 runs (workers 1, 1, 4): %zu label files + manifests compared, %zu differ",
                          files, diffs)};
}

// 9. 1 km^2 full pipeline, single-threaded, within 60 s.
Verdict throughput() {
  const DesignConfig c = class_config(1);
  const Assets assets = Assets::load(c);
  BenchOptions o;
  o.workers = 1;
  const BenchResult r = run_bench(c, assets, 1.0, o);
  return {r.wall_seconds <= 60.0 && r.instances == 120,
          fmt("%.2f km^2, %zu objects, %.2f s wall, %.2f s/km^2 (<= 60)", r.km2_generated,
              r.instances, r.wall_seconds, r.seconds_per_km2)};
}

// 10. Sweep identity/clamp properties and eval wiring.
Verdict sweep_and_eval() {
  const DesignConfig base = class_config(1);
  bool identity = true;
  for (auto p : {SweepParameter::kColorMean, SweepParameter::kSizeMean})
    identity = identity && make_sweep_configs(base, p, std::vector{0.0}).at(0) == base;
  DesignConfig bright = base;
  bright.color_mean = {250, 250, 250};
  const bool clamp =
      make_sweep_configs(bright, SweepParameter::kColorMean, std::vector{10.0}).at(0).color_mean ==
      Rgb{255, 255, 255};

  test::TempDir dir("accept_eval");
  DesignConfig c = base;
  c.num_patches = 4;
  test::write_file(dir / "c.yaml", serialize_config(c));
  std::ostringstream sink, report;
  bool wired = cli::dispatch({"sweep", "--config", (dir / "c.yaml").string(), "--param", "size_mean",
                              "--offsets", "-20,-10,10,20", "--out", (dir / "sw").string()},
                             sink, sink)
                   .exit_code == 0 &&
               fs::exists(dir / "sw" / "c_size_mean_-20.yaml");
  wired = wired && cli::dispatch({"generate", "--config", (dir / "c.yaml").string(), "--out",
                                  (dir / "ds").string()},
                                 sink, sink)
                           .exit_code == 0;
  fs::create_directories(dir / "det");
  for (const auto& e : fs::directory_iterator(dir / "ds" / "labels")) {
    std::string rows;
    for (const auto& a : parse_annotation_file(test::read_file(e.path()), c.patch_size, c.patch_size))
      rows += fmt("%d 0.8 %d %d %d %d\n", a.class_id, a.bbox.x, a.bbox.y, a.bbox.w, a.bbox.h);
    test::write_file(dir / "det" / e.path().filename(), rows);
  }
  const auto ev = cli::dispatch({"eval", "--gt", (dir / "ds").string(), "--det", (dir / "det").string(),
                                 "--area-km2", "4", "--alphas", "1"},
                                report, sink);
  wired = wired && ev.exit_code == 0 && report.str().find("ap50: 1") != std::string::npos &&
          report.str().find("alpha: 1") != std::string::npos;
  return {identity && clamp && wired,
          fmt("sweep offset 0 identity: %s, colour clamp: %s, sweep/generate/eval wiring: %s "
              "(detector-performance tables are not reproduced)",
              identity ? "ok" : "FAIL", clamp ? "ok" : "FAIL", wired ? "ok" : "FAIL")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"ground-truth fidelity", ground_truth_fidelity},
      {"density and placement", density_and_placement},
      {"sampling statistics", sampling_statistics},
      {"shadow geometry", shadow_geometry},
      {"geometry constants", geometry_constants},
      {"metrics oracle equivalence", metrics_oracle},
      {"rotation augmentation", rotation_augmentation},
      {"determinism", determinism},
      {"throughput", throughput},
      {"sweep and eval machinery", sweep_and_eval},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << id << ". " << criteria[i].first << ": "
              << v.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
