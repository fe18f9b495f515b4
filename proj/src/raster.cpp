#include "synapcount/raster.hpp"

#include <algorithm>
#include <string>

#include "synapcount/error.hpp"

namespace synapcount {

namespace {

void check_size(int width, int height) {
  if (width <= 0 || height <= 0)
    throw ValueError("image size must be positive, got " + std::to_string(width) + "x" + std::to_string(height));
}

std::size_t area(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

GrayImage::GrayImage(int width, int height, int bit_depth)
    : GrayImage(width, height, bit_depth, std::vector<std::uint16_t>(area(std::max(width, 0), std::max(height, 0)))) {}

GrayImage::GrayImage(int width, int height, int bit_depth, std::vector<std::uint16_t> pixels)
    : width_(width), height_(height), bit_depth_(bit_depth), pixels_(std::move(pixels)) {
  check_size(width, height);
  if (bit_depth != 8 && bit_depth != 16) throw ValueError("bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  if (pixels_.size() != area(width, height))
    throw ValueError("pixel count " + std::to_string(pixels_.size()) + " does not match " + std::to_string(width) +
                     "x" + std::to_string(height));
  if (bit_depth == 8 && std::any_of(pixels_.begin(), pixels_.end(), [](std::uint16_t v) { return v > 255; }))
    throw ValueError("intensity exceeds 8-bit range");
}

void GrayImage::set(int x, int y, std::uint16_t v) {
  if (v > max_value()) throw ValueError("intensity exceeds bit depth");
  pixels_[index(x, y)] = v;
}

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_size(width, height);
  pixels_.assign(area(width, height), fill);
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw ValueError("mask size must be non-negative");
  bits_.assign(area(width, height), fill ? 1 : 0);
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

bool Mask::subset_of(const Mask& other) const {
  if (!same_shape(other)) throw DimensionMismatch("mask sizes differ");
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

}  // namespace synapcount
