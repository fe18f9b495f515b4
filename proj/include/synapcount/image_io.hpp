#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synapcount/raster.hpp"

namespace synapcount {

enum class Channel { red = 0, green = 1, blue = 2 };

enum class NormalizeMode { full_range, min_max };

/// Parses "red"/"green"/"blue"; throws ValueError otherwise.
Channel parse_channel(const std::string& name);

/// Decodes the first page of a baseline TIFF held in memory.
///
/// Supported: little/big endian, strips, compression none or LZW (with or
/// without horizontal predictor), 8/16-bit grayscale (min-is-black or
/// min-is-white) and 8-bit chunky RGB. For RGB input `channel` selects the
/// plane to extract; omitting it raises ChannelRequiredError. Anything else
/// raises UnsupportedFormatError, truncated data ParseError.
GrayImage decode_tiff(std::span<const std::uint8_t> bytes, std::optional<Channel> channel = {});

/// Reads `path` and decodes it with decode_tiff. Unreadable files raise IoError.
GrayImage load_tiff(const std::filesystem::path& path, std::optional<Channel> channel = {});

/// Uncompressed little-endian single-strip grayscale TIFF.
std::vector<std::uint8_t> encode_tiff(const GrayImage& img);
void save_tiff(const GrayImage& img, const std::filesystem::path& path);

/// Maps an image into the 0..255 threshold domain.
/// full_range: round(v / 257) for 16-bit input, identity for 8-bit input.
/// min_max: linear stretch of [min, max] to [0, 255]; a constant image maps to 0.
GrayImage normalize_to_8bit(const GrayImage& img, NormalizeMode mode = NormalizeMode::full_range);

std::vector<std::uint8_t> encode_png(const RgbImage& img);
void save_png(const RgbImage& img, const std::filesystem::path& path);
RgbImage decode_png(std::span<const std::uint8_t> bytes);
RgbImage load_png(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace synapcount
