#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "simpl/config.hpp"

namespace simpl {

// Purpose tags keep streams for different roles independent even when they
// share image and instance indices.
enum class StreamPurpose : std::uint64_t {
  kSolar = 1,
  kInstance = 2,
  kPlacement = 3,
  kBenchmark = 4,
};

// Deterministic pseudorandom stream. Streams are plain values: copying one
// forks an identical sequence.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Seed derived by hashing (master_seed, purpose, image, instance).
  static std::uint64_t derive_seed(std::uint64_t master_seed, StreamPurpose purpose,
                                   std::uint64_t image_index, std::uint64_t instance_index = 0);
  static RngStream derive(std::uint64_t master_seed, StreamPurpose purpose,
                          std::uint64_t image_index, std::uint64_t instance_index = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform in [lo, hi); returns lo when the interval is degenerate.
  double uniform(double lo, double hi);
  // Normal deviate (Marsaglia polar method).
  double normal(double mean, double stddev);
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct InstanceProps {
  Rgb color{};
  SizePx size;
  double heading_deg = 0.0;
  std::size_t mesh_choice = 0;

  friend bool operator==(const InstanceProps&, const InstanceProps&) = default;
};

struct SolarParams {
  double elevation_deg = 90.0;
  double azimuth_deg = 0.0;
  double intensity = 1.0;

  friend bool operator==(const SolarParams&, const SolarParams&) = default;
};

inline constexpr int kMaxSizeRedraws = 100;

// Color ~ N(mean, std^2 I) clamped to [0, 255]; size ~ N(mean, std^2 I)
// redrawn while any component is nonpositive (GenerationError after
// kMaxSizeRedraws); heading ~ U[0, 360); mesh chosen uniformly.
InstanceProps sample_instance(const DesignConfig& config, RngStream& stream);

// Elevation, azimuth and intensity each uniform over their bounds.
SolarParams sample_solar(const DesignConfig& config, RngStream& stream);

}  // namespace simpl
