#include "simpl/image.hpp"

#include <algorithm>

#include "simpl/errors.hpp"

namespace simpl {

RasterImage::RasterImage(int w, int h, int ch, double gsd_m, std::uint8_t fill)
    : width(w),
      height(h),
      channels(ch),
      gsd(gsd_m),
      pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                 static_cast<std::size_t>(ch),
             fill) {}

RasterImage crop(const RasterImage& image, int x, int y, int width, int height) {
  if (x < 0 || y < 0 || width <= 0 || height <= 0 || x + width > image.width ||
      y + height > image.height) {
    throw ValidationError("crop window lies outside the image");
  }
  RasterImage out(width, height, image.channels, image.gsd);
  const std::size_t row_bytes = static_cast<std::size_t>(width) * static_cast<std::size_t>(image.channels);
  for (int r = 0; r < height; ++r) {
    const auto* src = image.pixels.data() + image.offset(x, y + r);
    std::copy(src, src + row_bytes, out.pixels.data() + out.offset(0, r));
  }
  return out;
}

RasterImage rotate_ccw(const RasterImage& image, int quarter_turns) {
  const int turns = ((quarter_turns % 4) + 4) % 4;
  if (turns == 0) return image;
  const bool swap = (turns % 2) == 1;
  RasterImage out(swap ? image.height : image.width, swap ? image.width : image.height,
                  image.channels, image.gsd);
  const int w = image.width;
  const int h = image.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int nx = 0;
      int ny = 0;
      switch (turns) {
        case 1:  // 90 deg: (x, y) -> (y, W - 1 - x)
          nx = y;
          ny = w - 1 - x;
          break;
        case 2:
          nx = w - 1 - x;
          ny = h - 1 - y;
          break;
        default:  // 270 deg: (x, y) -> (H - 1 - y, x)
          nx = h - 1 - y;
          ny = x;
          break;
      }
      for (int c = 0; c < image.channels; ++c) {
        out.at(nx, ny, c) = image.at(x, y, c);
      }
    }
  }
  return out;
}

RasterImage repeat_texture(const RasterImage& texture, int width, int height) {
  if (texture.width <= 0 || texture.height <= 0) {
    throw ValidationError("cannot repeat an empty texture");
  }
  RasterImage out(width, height, texture.channels, texture.gsd);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < texture.channels; ++c) {
        out.at(x, y, c) = texture.at(x % texture.width, y % texture.height, c);
      }
    }
  }
  return out;
}

}  // namespace simpl
