#pragma once

#include <filesystem>
#include <utility>

#include "simpl/image.hpp"

namespace simpl {

// Reads an 8-bit (or 16-bit, reduced) PNG. Palette and gray+alpha inputs are
// expanded; alpha is dropped. Throws IoError.
RasterImage read_png(const std::filesystem::path& path, double gsd = 0.0);

// Grayscale for one channel, RGB for three. Throws IoError.
void write_png(const std::filesystem::path& path, const RasterImage& image, int compression_level = 3);

// (width, height) from the PNG header without decoding pixels.
std::pair<int, int> png_dimensions(const std::filesystem::path& path);

}  // namespace simpl
