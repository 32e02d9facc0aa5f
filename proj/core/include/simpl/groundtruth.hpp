#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simpl/image.hpp"

namespace simpl {

// Integer pixel box: top-left corner plus size.
struct BBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long long area() const { return static_cast<long long>(w) * h; }
  friend auto operator<=>(const BBox&, const BBox&) = default;
};

struct Annotation {
  int class_id = 1;
  BBox bbox;
  std::string image_id;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;  // 0 or 1

  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)] != 0;
  }
};

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

using Component = std::vector<Pixel>;

inline constexpr int kDefaultThreshold = 128;
// Components smaller than this are rasterization specks, not targets.
inline constexpr std::size_t kMinComponentPixels = 4;

// True where pixel < threshold. Requires a single-channel image.
BinaryMask binarize(const RasterImage& image, int threshold = kDefaultThreshold);

// 8-connected components of set pixels, numbered in raster-scan order of each
// component's first pixel.
std::vector<Component> connected_components(const BinaryMask& mask);

BBox bounding_box(const Component& component);

// One tight box per component (specks dropped), sorted by (y, x).
std::vector<Annotation> extract_boxes(const RasterImage& gt, int class_id,
                                      const std::string& image_id = {});

}  // namespace simpl
