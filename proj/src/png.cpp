#include <png.h>

#include <cstring>
#include <string>

#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"

namespace synapcount {

namespace {

png_image rgb_header(const RgbImage& img) {
  png_image header;
  std::memset(&header, 0, sizeof header);
  header.version = PNG_IMAGE_VERSION;
  header.width = static_cast<png_uint_32>(img.width());
  header.height = static_cast<png_uint_32>(img.height());
  header.format = PNG_FORMAT_RGB;
  return header;
}

void check_writable(const RgbImage& img) {
  if (img.width() <= 0 || img.height() <= 0) throw ValueError("cannot write a PNG with zero width or height");
}

static_assert(sizeof(Rgb) == 3, "Rgb must be tightly packed for libpng");

}  // namespace

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  check_writable(img);
  png_image header = rgb_header(img);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&header, nullptr, &size, 0, img.pixels().data(), 0, nullptr))
    throw IoError(std::string("PNG encoding failed: ") + header.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&header, out.data(), &size, 0, img.pixels().data(), 0, nullptr))
    throw IoError(std::string("PNG encoding failed: ") + header.message);
  out.resize(size);
  return out;
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
  write_file(path, encode_png(img));
}

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image header;
  std::memset(&header, 0, sizeof header);
  header.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&header, bytes.data(), bytes.size()))
    throw ParseError(std::string("cannot decode PNG: ") + header.message);
  header.format = PNG_FORMAT_RGB;
  RgbImage img(static_cast<int>(header.width), static_cast<int>(header.height));
  if (!png_image_finish_read(&header, nullptr, img.pixels().data(), 0, nullptr)) {
    png_image_free(&header);
    throw ParseError(std::string("cannot decode PNG: ") + header.message);
  }
  return img;
}

RgbImage load_png(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return decode_png(bytes);
}

}  // namespace synapcount
