#include "synapcount/image_io.hpp"

#include <fstream>
#include <iterator>

#include "synapcount/error.hpp"
#include "synapcount/kernels.hpp"

namespace synapcount {

Channel parse_channel(const std::string& name) {
  if (name == "red") return Channel::red;
  if (name == "green") return Channel::green;
  if (name == "blue") return Channel::blue;
  throw ValueError("unknown channel '" + name + "' (expected red, green or blue)");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

GrayImage load_tiff(const std::filesystem::path& path, std::optional<Channel> channel) {
  const auto bytes = read_file(path);
  try {
    return decode_tiff(bytes, channel);
  } catch (const ParseError& e) {
    throw ParseError(path.filename().string() + ": " + e.what());
  } catch (const UnsupportedFormatError& e) {
    throw UnsupportedFormatError(path.filename().string() + ": " + e.what());
  } catch (const ChannelRequiredError& e) {
    throw ChannelRequiredError(path.filename().string() + ": " + e.what());
  }
}

void save_tiff(const GrayImage& img, const std::filesystem::path& path) {
  write_file(path, encode_tiff(img));
}

GrayImage normalize_to_8bit(const GrayImage& img, NormalizeMode mode) {
  if (img.empty()) return img;
  if (img.bit_depth() == 8 && mode == NormalizeMode::full_range) return img;
  std::vector<std::uint16_t> out(img.size());
  if (mode == NormalizeMode::full_range)
    kernels::parallel::normalize_full_range(img.pixels(), out);
  else
    kernels::parallel::normalize_min_max(img.pixels(), out);
  return GrayImage(img.width(), img.height(), 8, std::move(out));
}

}  // namespace synapcount
