#include "simpl/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>

#include "simpl/errors.hpp"

namespace simpl {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw IoError("cannot open '" + path.string() + "'");
  }
  return f;
}

[[noreturn]] void png_error_handler(png_structp, png_const_charp msg) {
  throw std::runtime_error(msg);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

RasterImage read_png(const std::filesystem::path& path, double gsd) {
  FilePtr file = open_file(path, "rb");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed for '" + path.string() + "'");
  }
  RasterImage image;
  try {
    png_init_io(png, file.get());
    png_read_info(png, info);
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int channels = png_get_channels(png, info);
    image = RasterImage(width, height, channels, gsd);
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) {
      rows[static_cast<std::size_t>(y)] = image.pixels.data() + image.offset(0, y);
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (const std::runtime_error& e) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("cannot decode PNG '" + path.string() + "': " + e.what());
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_png(const std::filesystem::path& path, const RasterImage& image, int compression_level) {
  if (image.channels != 1 && image.channels != 3) {
    throw IoError("cannot write '" + path.string() + "': only 1- and 3-channel images are supported");
  }
  FilePtr file = open_file(path, "wb");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed for '" + path.string() + "'");
  }
  try {
    png_init_io(png, file.get());
    png_set_compression_level(png, compression_level);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8,
                 image.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
      png_write_row(png, image.pixels.data() + image.offset(0, y));
    }
    png_write_end(png, nullptr);
  } catch (const std::runtime_error& e) {
    png_destroy_write_struct(&png, &info);
    throw IoError("cannot encode PNG '" + path.string() + "': " + e.what());
  }
  png_destroy_write_struct(&png, &info);
  if (std::fflush(file.get()) != 0) {
    throw IoError("write failed for '" + path.string() + "'");
  }
}

std::pair<int, int> png_dimensions(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  unsigned char header[24];
  if (std::fread(header, 1, sizeof(header), file.get()) != sizeof(header) ||
      png_sig_cmp(header, 0, 8) != 0) {
    throw IoError("'" + path.string() + "' is not a PNG file");
  }
  auto be32 = [&](int at) {
    return (static_cast<int>(header[at]) << 24) | (static_cast<int>(header[at + 1]) << 16) |
           (static_cast<int>(header[at + 2]) << 8) | static_cast<int>(header[at + 3]);
  };
  return {be32(16), be32(20)};
}

}  // namespace simpl
