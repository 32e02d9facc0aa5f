#include "simpl/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "simpl/errors.hpp"

namespace simpl {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RngStream::derive_seed(std::uint64_t master_seed, StreamPurpose purpose,
                                     std::uint64_t image_index, std::uint64_t instance_index) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  h = splitmix64(h ^ image_index);
  h = splitmix64(h ^ instance_index);
  return h;
}

RngStream RngStream::derive(std::uint64_t master_seed, StreamPurpose purpose,
                            std::uint64_t image_index, std::uint64_t instance_index) {
  return RngStream(derive_seed(master_seed, purpose, image_index, instance_index));
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  if (!(hi > lo)) return lo;
  return lo + (hi - lo) * uniform();
}

double RngStream::normal(double mean, double stddev) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + stddev * spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return mean + stddev * u * factor;
}

std::size_t RngStream::index(std::size_t n) {
  if (n <= 1) return 0;
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

InstanceProps sample_instance(const DesignConfig& config, RngStream& stream) {
  InstanceProps props;
  for (std::size_t ch = 0; ch < 3; ++ch) {
    props.color[ch] = std::clamp(stream.normal(config.color_mean[ch], config.color_std), 0.0, 255.0);
  }
  int attempt = 0;
  for (;; ++attempt) {
    if (attempt == kMaxSizeRedraws) {
      throw GenerationError("size sampling produced " + std::to_string(kMaxSizeRedraws) +
                            " consecutive nonpositive draws; size.std is too large for size.mean");
    }
    const double length = stream.normal(config.size_mean.length, config.size_std);
    const double width = stream.normal(config.size_mean.width, config.size_std);
    if (length > 0.0 && width > 0.0) {
      props.size = {length, width};
      break;
    }
  }
  props.heading_deg = stream.uniform(0.0, 360.0);
  if (props.heading_deg >= 360.0) props.heading_deg = 0.0;
  props.mesh_choice = stream.index(config.mesh_paths.size());
  return props;
}

SolarParams sample_solar(const DesignConfig& config, RngStream& stream) {
  SolarParams solar;
  solar.elevation_deg = stream.uniform(config.solar_elevation.lower, config.solar_elevation.upper);
  solar.azimuth_deg = stream.uniform(config.solar_azimuth.lower, config.solar_azimuth.upper);
  solar.intensity = stream.uniform(config.solar_intensity.lower, config.solar_intensity.upper);
  return solar;
}

}  // namespace simpl
