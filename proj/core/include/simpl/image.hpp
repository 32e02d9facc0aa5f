#pragma once

#include <cstdint>
#include <vector>

namespace simpl {

// 8-bit raster, row-major, channels interleaved.
struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  double gsd = 0.0;  // meters per pixel
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int width, int height, int channels, double gsd, std::uint8_t fill = 0);

  std::size_t offset(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels) +
           static_cast<std::size_t>(c);
  }
  std::uint8_t& at(int x, int y, int c = 0) { return pixels[offset(x, y, c)]; }
  std::uint8_t at(int x, int y, int c = 0) const { return pixels[offset(x, y, c)]; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

RasterImage crop(const RasterImage& image, int x, int y, int width, int height);

// Rotates counter-clockwise (as displayed, y pointing down) by quarter_turns * 90 degrees.
RasterImage rotate_ccw(const RasterImage& image, int quarter_turns);

// Fills a width x height canvas by repeating `texture`.
RasterImage repeat_texture(const RasterImage& texture, int width, int height);

}  // namespace simpl
