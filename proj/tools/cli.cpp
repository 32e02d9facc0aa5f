#include "simpl_tools/cli.hpp"

#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "simpl/bench.hpp"
#include "simpl/config.hpp"
#include "simpl/dataset.hpp"
#include "simpl/errors.hpp"
#include "simpl/groundtruth.hpp"
#include "simpl/image_io.hpp"
#include "simpl/metrics.hpp"
#include "simpl/pipeline.hpp"

namespace simpl::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& suffix) {
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::string strip_suffix(const std::string& name, const std::string& suffix) {
  return name.substr(0, name.size() - suffix.size());
}

// Class id encoded as the `{class_id}_...` file-name prefix, if any.
std::optional<int> class_from_name(const std::string& stem) {
  const auto underscore = stem.find('_');
  if (underscore == std::string::npos || underscore == 0) return std::nullopt;
  int value = 0;
  for (std::size_t i = 0; i < underscore; ++i) {
    if (stem[i] < '0' || stem[i] > '9') return std::nullopt;
    value = value * 10 + (stem[i] - '0');
  }
  return value >= 1 ? std::optional<int>(value) : std::nullopt;
}

// FNV-1a over file names and bytes, in sorted order.
std::string hash_files(const std::vector<fs::path>& files) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& f : files) {
    mix(f.filename().string());
    mix(std::string_view("\0", 1));
    mix(read_text(f));
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

std::string emit(const YAML::Node& node) {
  YAML::Emitter out;
  out.SetDoublePrecision(10);
  out << node;
  return std::string(out.c_str()) + "\n";
}

std::string format_number(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

struct Options {
  std::string config;
  // generate
  std::string out;
  unsigned workers = 1;
  bool save_world = false;
  // extract-gt / tile
  std::string in;
  int class_id = 0;
  int patch = 608;
  double min_visibility = 0.25;
  bool rotations = false;
  // sweep
  std::string param;
  std::vector<double> offsets;
  // eval
  std::string gt;
  std::vector<std::string> det;
  double area_km2 = 0.0;
  std::vector<double> alphas{1.0};
  int image_size = 0;
  // bench
  double km2 = 1.0;
};

std::optional<DesignConfig> maybe_config(const Options& o) {
  if (o.config.empty()) return std::nullopt;
  return load_config(o.config);
}

CommandOutcome run_generate(const Options& o, std::ostream& out, spdlog::logger& log) {
  const DesignConfig config = load_config(o.config);
  log.info("generate: class {} master_seed {} target patches {}", config.class_id,
           config.master_seed, config.num_patches);
  const Assets assets = Assets::load(config);
  for (const auto& w : assets.warnings) log.warn("{}", w);

  GenerateOptions options;
  options.workers = o.workers;
  options.save_world = o.save_world;
  options.on_world = [&log](const WorldRecord& w) {
    log.info("world {:05} seed {:#018x} instances {} sun el {:.2f} az {:.2f} si {:.3f} ({})",
             w.image_index, w.image_seed, w.instance_count, w.solar.elevation_deg,
             w.solar.azimuth_deg, w.solar.intensity, w.background);
  };
  const fs::path out_dir = o.out;
  const DatasetManifest manifest = generate_dataset(config, assets, out_dir, options);
  for (const auto& w : manifest.warnings) log.warn("{}", w);

  std::size_t boxes = 0;
  for (const auto& p : manifest.patches) boxes += p.annotation_count;
  CommandOutcome outcome;
  outcome.summary = "wrote " + std::to_string(manifest.patches.size()) + " patches (" +
                    std::to_string(boxes) + " boxes) from " +
                    std::to_string(manifest.worlds.size()) + " worlds to " + out_dir.string();
  outcome.report_path = out_dir / "manifest.yaml";
  out << outcome.summary << "\n";
  return outcome;
}

int resolve_class(const Options& o, const std::optional<DesignConfig>& config,
                  const std::string& stem) {
  if (o.class_id > 0) return o.class_id;
  if (config) return config->class_id;
  return class_from_name(stem).value_or(1);
}

CommandOutcome run_extract_gt(const Options& o, std::ostream& out, spdlog::logger& log) {
  const auto config = maybe_config(o);
  const fs::path in_dir = o.in;
  const fs::path out_dir = o.out.empty() ? in_dir : fs::path(o.out);
  const std::string suffix = "_gt.png";
  const auto files = sorted_files(in_dir, suffix);
  std::size_t boxes = 0;
  for (const auto& file : files) {
    const std::string stem = strip_suffix(file.filename().string(), suffix);
    const RasterImage gt = read_png(file);
    const auto annotations = extract_boxes(gt, resolve_class(o, config, stem), stem);
    write_text(out_dir / (stem + ".txt"), format_annotation_file(annotations, gt.width, gt.height));
    log.info("{}: {} boxes", file.filename().string(), annotations.size());
    boxes += annotations.size();
  }
  CommandOutcome outcome;
  outcome.summary = "extracted " + std::to_string(boxes) + " boxes from " +
                    std::to_string(files.size()) + " ground-truth images";
  out << outcome.summary << "\n";
  return outcome;
}

CommandOutcome run_tile(const Options& o, std::ostream& out, spdlog::logger& log) {
  const auto config = maybe_config(o);
  const fs::path in_dir = o.in;
  const fs::path out_dir = o.out.empty() ? in_dir / "tiles" : fs::path(o.out);
  const std::string suffix = "_gt.png";
  DatasetManifest manifest;
  manifest.config = config;
  manifest.tool_version = SIMPL_VERSION;
  manifest.started_at = utc_timestamp();

  std::size_t next_index = 0;
  int class_id = 1;
  for (const auto& gt_file : sorted_files(in_dir, suffix)) {
    const std::string stem = strip_suffix(gt_file.filename().string(), suffix);
    const fs::path rgb_file = in_dir / (stem + ".png");
    if (!fs::exists(rgb_file)) {
      log.warn("{}: no matching RGB image, skipped", gt_file.filename().string());
      continue;
    }
    class_id = resolve_class(o, config, stem);
    const RasterImage rgb = read_png(rgb_file);
    const RasterImage gt = read_png(gt_file);
    const auto boxes = extract_boxes(gt, class_id, stem);
    auto patches = tile_image(rgb, boxes, o.patch, o.min_visibility, stem);
    auto gt_patches = tile_image(gt, boxes, o.patch, o.min_visibility, stem);
    if (o.rotations) {
      const std::size_t base = patches.size();
      for (std::size_t i = 0; i < base; ++i) {
        for (int angle : {90, 180, 270}) {
          patches.push_back(rotate_patch(patches[i], angle));
          gt_patches.push_back(rotate_patch(gt_patches[i], angle));
        }
      }
    }
    auto records = write_patches(patches, out_dir, class_id, next_index);
    fs::create_directories(out_dir / "gt");
    for (std::size_t i = 0; i < gt_patches.size(); ++i) {
      write_png(out_dir / "gt" / (image_stem(class_id, next_index + i) + "_gt.png"),
                gt_patches[i].image);
    }
    next_index += patches.size();
    log.info("{}: {} boxes -> {} patches", stem, boxes.size(), patches.size());
    manifest.patches.insert(manifest.patches.end(), records.begin(), records.end());
  }
  manifest.finished_at = utc_timestamp();
  write_manifest(manifest, out_dir);

  CommandOutcome outcome;
  outcome.summary = "wrote " + std::to_string(manifest.patches.size()) + " patches to " +
                    out_dir.string();
  outcome.report_path = out_dir / "manifest.yaml";
  out << outcome.summary << "\n";
  return outcome;
}

CommandOutcome run_sweep(const Options& o, std::ostream& out, spdlog::logger& log) {
  const DesignConfig base = load_config(o.config);
  const SweepParameter param = parse_sweep_parameter(o.param);
  if (o.offsets.empty()) throw ValidationError("sweep: --offsets must list at least one value");
  const auto configs = make_sweep_configs(base, param, o.offsets);
  const fs::path out_dir = o.out.empty() ? fs::path("sweep") : fs::path(o.out);
  const std::string stem = fs::path(o.config).stem().string();
  for (std::size_t i = 0; i < configs.size(); ++i) {
    std::string tag = format_number(o.offsets[i]);
    if (param != SweepParameter::kNumPatches && o.offsets[i] >= 0) tag = "+" + tag;
    const fs::path file = out_dir / (stem + "_" + std::string(to_string(param)) + "_" + tag + ".yaml");
    write_text(file, serialize_config(configs[i]));
    log.info("{}", file.string());
    out << file.string() << "\n";
  }
  CommandOutcome outcome;
  outcome.summary = "wrote " + std::to_string(configs.size()) + " configs to " + out_dir.string();
  return outcome;
}

struct GroundTruthSet {
  std::vector<Annotation> boxes;
  std::map<std::string, fs::path> images;  // image id -> label file
  std::vector<fs::path> files;
};

GroundTruthSet load_ground_truth(const Options& o) {
  const fs::path root = o.gt;
  const fs::path labels = fs::is_directory(root / "labels") ? root / "labels" : root;
  const fs::path images = fs::is_directory(root / "images") ? root / "images" : root;
  std::optional<int> manifest_side;
  if (fs::exists(root / "manifest.yaml")) {
    const auto manifest = read_manifest(root / "manifest.yaml");
    if (manifest.config) manifest_side = manifest.config->patch_size;
  }
  GroundTruthSet set;
  set.files = sorted_files(labels, ".txt");
  for (const auto& file : set.files) {
    const std::string id = file.stem().string();
    int width = o.image_size;
    int height = o.image_size;
    if (width <= 0) {
      const fs::path png = images / (id + ".png");
      if (fs::exists(png)) {
        std::tie(width, height) = png_dimensions(png);
      } else if (manifest_side) {
        width = height = *manifest_side;
      } else {
        throw ValidationError("eval: cannot determine the size of image '" + id +
                              "'; pass --image-size");
      }
    }
    auto rows = parse_annotation_file(read_text(file), width, height, id);
    set.boxes.insert(set.boxes.end(), rows.begin(), rows.end());
    set.images[id] = file;
  }
  if (set.files.empty()) throw ValidationError("eval: no ground-truth label files in " + labels.string());
  return set;
}

CommandOutcome run_eval(const Options& o, std::ostream& out, spdlog::logger& log) {
  const GroundTruthSet gt = load_ground_truth(o);
  if (!(o.area_km2 > 0.0)) throw ValidationError("eval: --area-km2 must be > 0");

  YAML::Node report;
  report["inputs"]["ground_truth"]["path"] = o.gt;
  report["inputs"]["ground_truth"]["hash"] = hash_files(gt.files);
  report["inputs"]["ground_truth"]["images"] = gt.images.size();
  std::vector<EvalReport> runs;
  for (const auto& det_dir : o.det) {
    std::vector<Detection> detections;
    const auto files = sorted_files(det_dir, ".txt");
    for (const auto& file : files) {
      const std::string id = file.stem().string();
      if (!gt.images.contains(id)) {
        throw ValidationError("eval: detection file '" + file.string() +
                              "' has no matching ground truth image");
      }
      auto rows = parse_detection_file(read_text(file), id);
      detections.insert(detections.end(), rows.begin(), rows.end());
    }
    runs.push_back(evaluate(detections, gt.boxes, o.area_km2, o.alphas));
    YAML::Node run = report_to_yaml(runs.back());
    run["path"] = det_dir;
    run["hash"] = hash_files(files);
    report["runs"].push_back(run);
    log.info("{}: AP50 {:.4f} over {} detections", det_dir, runs.back().ap50, detections.size());
  }
  const EvalReport mean = aggregate_runs(runs);
  report["mean"] = report_to_yaml(mean);

  CommandOutcome outcome;
  std::ostringstream summary;
  summary << "AP50 " << mean.ap50;
  for (const auto& [alpha, recall] : mean.recall_at) summary << ", R(" << alpha << ") " << recall;
  summary << " (mean of " << runs.size() << " run" << (runs.size() == 1 ? "" : "s") << ")";
  outcome.summary = summary.str();
  const std::string text = emit(report);
  if (!o.out.empty()) {
    write_text(o.out, text);
    outcome.report_path = o.out;
  }
  out << text;
  return outcome;
}

CommandOutcome run_bench_cmd(const Options& o, std::ostream& out, spdlog::logger& log) {
  const DesignConfig config = load_config(o.config);
  const Assets assets = Assets::load(config);
  BenchOptions options;
  options.workers = o.workers;
  log.info("bench: {} km2 at gsd {} with {} objects/km2, {} worker(s)", o.km2, config.gsd,
           config.density, o.workers);
  const BenchResult result = run_bench(config, assets, o.km2, options);
  const std::string text = bench_result_to_yaml(result);
  CommandOutcome outcome;
  std::ostringstream summary;
  summary << std::fixed << std::setprecision(2) << result.seconds_per_km2 << " s/km2 ("
          << result.wall_seconds << " s for " << result.km2_generated << " km2)";
  outcome.summary = summary.str();
  if (!o.out.empty()) {
    write_text(o.out, text);
    outcome.report_path = o.out;
  }
  out << text;
  return outcome;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e)) {
    return kValidationFailure;
  }
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kIoFailure;
  }
  return kGenerationFailure;
}

}  // namespace

CommandOutcome dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  spdlog::logger log("simpl", sink);
  log.set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");

  CLI::App app{"Synthetic overhead imagery generator and detection evaluator", "simpl"};
  app.require_subcommand(1);
  app.set_version_flag("--version",
                       std::string("simpl ") + SIMPL_VERSION + " (manifest format " +
                           std::to_string(kManifestFormatVersion) + ", annotation format " +
                           std::to_string(kAnnotationFormatVersion) + ")");
  Options o;

  auto* generate = app.add_subcommand("generate", "Render a synthetic dataset");
  generate->add_option("--config", o.config, "Design configuration (YAML)")->required();
  generate->add_option("--out", o.out, "Output dataset directory")->required();
  generate->add_option("--workers", o.workers, "Worlds rendered in parallel")
      ->check(CLI::PositiveNumber);
  generate->add_flag("--save-world", o.save_world, "Also write full world RGB and GT renders");

  auto* extract = app.add_subcommand("extract-gt", "Derive box labels from *_gt.png renders");
  extract->add_option("--config", o.config, "Design configuration (class id)");
  extract->add_option("--in", o.in, "Directory of *_gt.png images")->required();
  extract->add_option("--out", o.out, "Label output directory (default: --in)");
  extract->add_option("--class-id", o.class_id, "Class id for every box")->check(CLI::PositiveNumber);

  auto* tile = app.add_subcommand("tile", "Cut world renders into training patches");
  tile->add_option("--config", o.config, "Design configuration (class id, manifest snapshot)");
  tile->add_option("--in", o.in, "Directory of X.png / X_gt.png world renders")->required();
  tile->add_option("--out", o.out, "Output dataset directory (default: <in>/tiles)");
  tile->add_option("--patch", o.patch, "Patch side in pixels")->check(CLI::PositiveNumber);
  tile->add_option("--min-visibility", o.min_visibility, "Fraction of a box that must remain")
      ->check(CLI::Range(0.0, 1.0));
  tile->add_option("--class-id", o.class_id, "Class id for every box")->check(CLI::PositiveNumber);
  tile->add_flag("--rotations", o.rotations, "Add 90/180/270 degree copies of every patch");

  auto* sweep = app.add_subcommand("sweep", "Write perturbed copies of a configuration");
  sweep->add_option("--config", o.config, "Base configuration")->required();
  sweep->add_option("--param", o.param, "color_mean, size_mean or num_patches")->required();
  sweep->add_option("--offsets", o.offsets, "Percent offsets, or K values for num_patches")
      ->required()
      ->delimiter(',')
      ->allow_extra_args(false);
  sweep->add_option("--out", o.out, "Output directory (default: ./sweep)");

  auto* eval = app.add_subcommand("eval", "Score detections with AP50 and R(alpha)");
  eval->add_option("--config", o.config, "Design configuration (unused; accepted for symmetry)");
  eval->add_option("--gt", o.gt, "Ground-truth dataset or label directory")->required();
  eval->add_option("--det", o.det, "Detection directory; repeat to average runs")->required();
  eval->add_option("--area-km2", o.area_km2, "Imagery area covered by the ground truth")->required();
  eval->add_option("--alphas", o.alphas, "False alarms per km2")->delimiter(',');
  eval->add_option("--image-size", o.image_size, "Label normalisation side when no image is found");
  eval->add_option("--out", o.out, "Also write the report to this file");

  auto* bench = app.add_subcommand("bench", "Time end-to-end generation per km2");
  bench->add_option("--config", o.config, "Design configuration")->required();
  bench->add_option("--km2", o.km2, "Area to generate (>= 1)");
  bench->add_option("--workers", o.workers, "Worlds rendered in parallel")
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", o.out, "Also write the result to this file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code != 0) err << app.help();
    return {code == 0 ? kSuccess : kValidationFailure, e.what(), std::nullopt};
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    CommandOutcome outcome;
    if (name == "generate") {
      outcome = run_generate(o, out, log);
    } else if (name == "extract-gt") {
      outcome = run_extract_gt(o, out, log);
    } else if (name == "tile") {
      outcome = run_tile(o, out, log);
    } else if (name == "sweep") {
      outcome = run_sweep(o, out, log);
    } else if (name == "eval") {
      outcome = run_eval(o, out, log);
    } else {
      outcome = run_bench_cmd(o, out, log);
    }
    log.info("{}", outcome.summary);
    return outcome;
  } catch (const std::exception& e) {
    log.error("{}", e.what());
    return {exit_code_for(e), e.what(), std::nullopt};
  }
}

}  // namespace simpl::cli
