#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "simpl/config.hpp"
#include "simpl/pipeline.hpp"

namespace simpl {

struct BenchResult {
  double km2_generated = 0.0;
  double wall_seconds = 0.0;
  int objects_per_km2 = 0;
  double seconds_per_km2 = 0.0;
  std::string hardware;
  unsigned workers = 1;
  std::size_t worlds = 0;
  std::size_t instances = 0;
  std::vector<std::string> stages;
};

struct BenchOptions {
  unsigned workers = 1;
  // Export destination; a temporary directory (removed afterwards) when empty.
  std::filesystem::path out_dir;
};

// Times scene build, RGB render, GT render, box extraction, tiling and export
// for ceil(km2) square worlds totalling km2. Asset loading and background
// preparation happen before the clock starts.
BenchResult run_bench(const DesignConfig& config, const Assets& assets, double km2,
                      const BenchOptions& options = {});

std::string bench_result_to_yaml(const BenchResult& result);

std::string hardware_note();

}  // namespace simpl
