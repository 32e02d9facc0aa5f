#include "simpl/groundtruth.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "simpl/errors.hpp"

namespace simpl {

BinaryMask binarize(const RasterImage& image, int threshold) {
  if (image.channels != 1) {
    throw ValidationError("binarize: expected a single-channel image, got " +
                          std::to_string(image.channels) + " channels");
  }
  BinaryMask mask{image.width, image.height, std::vector<std::uint8_t>(image.pixels.size())};
  std::transform(image.pixels.begin(), image.pixels.end(), mask.bits.begin(),
                 [threshold](std::uint8_t v) { return static_cast<std::uint8_t>(v < threshold); });
  return mask;
}

std::vector<Component> connected_components(const BinaryMask& mask) {
  const int w = mask.width;
  const int h = mask.height;
  std::vector<std::uint8_t> seen(mask.bits.size(), 0);
  std::vector<Component> components;
  std::vector<Pixel> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                              static_cast<std::size_t>(x);
      if (!mask.bits[idx] || seen[idx]) continue;
      Component comp;
      seen[idx] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        comp.push_back(p);
        for (int dy = -1; dy <= 1; ++dy) {
          const int ny = p.y + dy;
          if (ny < 0 || ny >= h) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            if (nx < 0 || nx >= w || (dx == 0 && dy == 0)) continue;
            const std::size_t n = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) +
                                  static_cast<std::size_t>(nx);
            if (mask.bits[n] && !seen[n]) {
              seen[n] = 1;
              stack.push_back({nx, ny});
            }
          }
        }
      }
      components.push_back(std::move(comp));
    }
  }
  return components;
}

BBox bounding_box(const Component& component) {
  int min_x = std::numeric_limits<int>::max();
  int min_y = std::numeric_limits<int>::max();
  int max_x = std::numeric_limits<int>::min();
  int max_y = std::numeric_limits<int>::min();
  for (const Pixel& p : component) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  return {min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

std::vector<Annotation> extract_boxes(const RasterImage& gt, int class_id,
                                      const std::string& image_id) {
  std::vector<Annotation> out;
  for (const Component& comp : connected_components(binarize(gt))) {
    if (comp.size() < kMinComponentPixels) continue;
    out.push_back({class_id, bounding_box(comp), image_id});
  }
  std::sort(out.begin(), out.end(), [](const Annotation& a, const Annotation& b) {
    return std::tie(a.bbox.y, a.bbox.x, a.bbox.h, a.bbox.w) <
           std::tie(b.bbox.y, b.bbox.x, b.bbox.h, b.bbox.w);
  });
  return out;
}

}  // namespace simpl
