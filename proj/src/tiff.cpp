// Baseline TIFF reader/writer: first IFD only, stripped layout, no or LZW
// compression, 8/16-bit grayscale and 8-bit chunky RGB.

#include <algorithm>
#include <array>
#include <cstring>
#include <map>
#include <string>

#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"

namespace synapcount {

namespace {

enum Tag : std::uint16_t {
  kImageWidth = 256,
  kImageLength = 257,
  kBitsPerSample = 258,
  kCompression = 259,
  kPhotometric = 262,
  kStripOffsets = 273,
  kSamplesPerPixel = 277,
  kRowsPerStrip = 278,
  kStripByteCounts = 279,
  kPlanarConfig = 284,
  kPredictor = 317,
  kTileWidth = 322,
  kSampleFormat = 339,
};

constexpr std::uint16_t kCompressionNone = 1;
constexpr std::uint16_t kCompressionLzw = 5;

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, bool big_endian) : bytes_(bytes), big_(big_endian) {}

  std::uint16_t u16(std::size_t off) const {
    need(off, 2);
    const auto* p = bytes_.data() + off;
    return big_ ? static_cast<std::uint16_t>(p[0] << 8 | p[1]) : static_cast<std::uint16_t>(p[1] << 8 | p[0]);
  }
  std::uint32_t u32(std::size_t off) const {
    need(off, 4);
    const auto* p = bytes_.data() + off;
    return big_ ? (std::uint32_t{p[0]} << 24 | std::uint32_t{p[1]} << 16 | std::uint32_t{p[2]} << 8 | p[3])
                : (std::uint32_t{p[3]} << 24 | std::uint32_t{p[2]} << 16 | std::uint32_t{p[1]} << 8 | p[0]);
  }
  std::span<const std::uint8_t> slice(std::size_t off, std::size_t len) const {
    need(off, len);
    return bytes_.subspan(off, len);
  }
  bool big_endian() const { return big_; }

 private:
  void need(std::size_t off, std::size_t len) const {
    if (off > bytes_.size() || len > bytes_.size() - off) throw ParseError("truncated TIFF data");
  }
  std::span<const std::uint8_t> bytes_;
  bool big_;
};

std::size_t type_size(std::uint16_t type) {
  switch (type) {
    case 1: case 2: case 6: case 7: return 1;
    case 3: case 8: return 2;
    case 4: case 9: case 11: return 4;
    case 5: case 10: case 12: return 8;
    default: return 0;
  }
}

using Directory = std::map<std::uint16_t, std::vector<std::uint32_t>>;

// Integer-valued tags only; rational/float/ascii entries are recorded empty.
Directory read_directory(const Reader& r, std::uint32_t offset) {
  Directory dir;
  const std::uint16_t n = r.u16(offset);
  for (std::uint16_t i = 0; i < n; ++i) {
    const std::size_t e = offset + 2 + 12u * i;
    const std::uint16_t tag = r.u16(e);
    const std::uint16_t type = r.u16(e + 2);
    const std::uint32_t count = r.u32(e + 4);
    const std::size_t size = type_size(type);
    std::vector<std::uint32_t> values;
    if (size == 0 || (type != 1 && type != 3 && type != 4)) {
      dir[tag] = values;
      continue;
    }
    if (count > (1u << 24)) throw ParseError("TIFF tag " + std::to_string(tag) + " has an implausible count");
    const std::size_t base = size * count <= 4 ? e + 8 : r.u32(e + 8);
    values.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
      const std::size_t at = base + size * k;
      values.push_back(type == 1 ? r.slice(at, 1)[0] : type == 3 ? r.u16(at) : r.u32(at));
    }
    dir[tag] = std::move(values);
  }
  return dir;
}

std::uint32_t scalar(const Directory& dir, Tag tag, std::optional<std::uint32_t> fallback = {}) {
  auto it = dir.find(tag);
  if (it == dir.end() || it->second.empty()) {
    if (fallback) return *fallback;
    throw ParseError("TIFF is missing required tag " + std::to_string(tag));
  }
  return it->second.front();
}

// TIFF LZW: MSB-first codes of 9..12 bits, ClearCode 256, EndOfInformation
// 257, code width growing one entry early.
std::vector<std::uint8_t> lzw_decode(std::span<const std::uint8_t> in, std::size_t expected) {
  constexpr int kClear = 256;
  constexpr int kEoi = 257;
  constexpr int kMaxCodes = 4096;
  struct Entry {
    std::int32_t prefix;
    std::uint16_t length;
    std::uint8_t suffix;
    std::uint8_t first;
  };
  std::vector<Entry> table(kMaxCodes);
  for (int i = 0; i < 256; ++i) table[i] = {-1, 1, static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(i)};

  std::vector<std::uint8_t> out;
  out.reserve(expected);
  int next = 258;
  int width = 9;
  std::size_t bitpos = 0;
  const std::size_t total_bits = in.size() * 8;

  auto read_code = [&]() -> int {
    if (bitpos + width > total_bits) return kEoi;
    int code = 0;
    for (int i = 0; i < width; ++i, ++bitpos)
      code = (code << 1) | ((in[bitpos >> 3] >> (7 - (bitpos & 7))) & 1);
    return code;
  };
  auto emit = [&](int code) {
    const std::size_t len = table[code].length;
    const std::size_t at = out.size();
    out.resize(at + len);
    for (int c = code; c >= 0; c = table[c].prefix) out[at + table[c].length - 1] = table[c].suffix;
  };
  auto grow = [&]() {
    if (next >= 2047) width = 12;
    else if (next >= 1023) width = 11;
    else if (next >= 511) width = 10;
    else width = 9;
  };

  int old = -1;
  while (out.size() < expected) {
    int code = read_code();
    if (code == kEoi) break;
    if (code == kClear) {
      next = 258;
      width = 9;
      code = read_code();
      if (code == kEoi) break;
      if (code > 255) throw ParseError("corrupt LZW stream: code after clear is not a literal");
      emit(code);
      old = code;
      continue;
    }
    if (old < 0) throw ParseError("corrupt LZW stream: missing leading clear code");
    if (code < next) {
      emit(code);
      if (next < kMaxCodes)
        table[next++] = {old, static_cast<std::uint16_t>(table[old].length + 1), table[code].first, table[old].first};
    } else if (code == next && next < kMaxCodes) {
      table[next++] = {old, static_cast<std::uint16_t>(table[old].length + 1), table[old].first, table[old].first};
      emit(code);
    } else {
      throw ParseError("corrupt LZW stream: code " + std::to_string(code) + " out of table");
    }
    old = code;
    grow();
  }
  if (out.size() < expected) throw ParseError("LZW strip decodes to fewer bytes than expected");
  out.resize(expected);
  return out;
}

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v & 0xff));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

GrayImage decode_tiff(std::span<const std::uint8_t> bytes, std::optional<Channel> channel) {
  if (bytes.size() < 8) throw ParseError("not a TIFF file (too short)");
  bool big;
  if (bytes[0] == 'I' && bytes[1] == 'I')
    big = false;
  else if (bytes[0] == 'M' && bytes[1] == 'M')
    big = true;
  else
    throw ParseError("not a TIFF file (bad byte-order mark)");
  const Reader r(bytes, big);
  const std::uint16_t magic = r.u16(2);
  if (magic == 43) throw UnsupportedFormatError("BigTIFF is not supported");
  if (magic != 42) throw ParseError("not a TIFF file (bad magic number)");
  const Directory dir = read_directory(r, r.u32(4));

  if (dir.count(kTileWidth)) throw UnsupportedFormatError("tiled TIFF is not supported");
  const auto width = scalar(dir, kImageWidth);
  const auto height = scalar(dir, kImageLength);
  if (width == 0 || height == 0 || width > 65535 || height > 65535)
    throw UnsupportedFormatError("unsupported TIFF dimensions " + std::to_string(width) + "x" + std::to_string(height));
  const auto spp = scalar(dir, kSamplesPerPixel, 1);
  const auto compression = scalar(dir, kCompression, kCompressionNone);
  const auto photometric = scalar(dir, kPhotometric);
  const auto predictor = scalar(dir, kPredictor, 1);
  const auto planar = scalar(dir, kPlanarConfig, 1);
  const auto sample_format = scalar(dir, kSampleFormat, 1);

  std::uint32_t bps = 1;
  if (auto it = dir.find(kBitsPerSample); it != dir.end() && !it->second.empty()) {
    bps = it->second.front();
    if (std::any_of(it->second.begin(), it->second.end(), [&](std::uint32_t b) { return b != bps; }))
      throw UnsupportedFormatError("mixed bits per sample");
  }

  if (compression != kCompressionNone && compression != kCompressionLzw)
    throw UnsupportedFormatError("unsupported TIFF compression " + std::to_string(compression) +
                                 " (only none and LZW)");
  if (bps != 8 && bps != 16) throw UnsupportedFormatError("unsupported bit depth " + std::to_string(bps));
  if (sample_format != 1) throw UnsupportedFormatError("only unsigned integer samples are supported");
  if (predictor != 1 && predictor != 2) throw UnsupportedFormatError("unsupported predictor " + std::to_string(predictor));

  const bool rgb = photometric == 2;
  if (photometric > 2) throw UnsupportedFormatError("unsupported photometric interpretation " + std::to_string(photometric));
  if (rgb) {
    if (bps != 8) throw UnsupportedFormatError("RGB TIFF must be 8 bits per channel");
    if (spp < 3) throw ParseError("RGB TIFF with fewer than 3 samples per pixel");
    if (planar != 1 && spp > 1) throw UnsupportedFormatError("planar (separate) RGB TIFF is not supported");
    if (!channel) throw ChannelRequiredError("RGB TIFF needs a channel (red, green or blue)");
  } else if (spp != 1) {
    throw UnsupportedFormatError("grayscale TIFF with " + std::to_string(spp) + " samples per pixel");
  }

  const auto rows_per_strip = std::min<std::uint32_t>(scalar(dir, kRowsPerStrip, 0xffffffffu), height);
  const std::size_t bytes_per_sample = bps / 8;
  const std::size_t row_bytes = std::size_t{width} * spp * bytes_per_sample;
  const auto offsets_it = dir.find(kStripOffsets);
  if (offsets_it == dir.end() || offsets_it->second.empty()) throw ParseError("TIFF has no strip offsets");
  const auto& offsets = offsets_it->second;
  const std::size_t strips = (height + rows_per_strip - 1) / rows_per_strip;
  if (offsets.size() < strips) throw ParseError("TIFF has fewer strips than rows require");
  std::vector<std::uint32_t> counts;
  if (auto it = dir.find(kStripByteCounts); it != dir.end() && it->second.size() >= strips) {
    counts = it->second;
  } else if (compression == kCompressionNone) {
    for (std::size_t s = 0; s < strips; ++s)
      counts.push_back(static_cast<std::uint32_t>(row_bytes * std::min<std::size_t>(rows_per_strip, height - s * rows_per_strip)));
  } else {
    throw ParseError("compressed TIFF without strip byte counts");
  }

  std::vector<std::uint8_t> raw;
  raw.reserve(row_bytes * height);
  for (std::size_t s = 0; s < strips; ++s) {
    const std::size_t rows = std::min<std::size_t>(rows_per_strip, height - s * rows_per_strip);
    const std::size_t want = rows * row_bytes;
    if (compression == kCompressionNone) {
      if (counts[s] < want) throw ParseError("TIFF strip " + std::to_string(s) + " is shorter than its rows");
      const auto data = r.slice(offsets[s], want);
      raw.insert(raw.end(), data.begin(), data.end());
    } else {
      const auto decoded = lzw_decode(r.slice(offsets[s], counts[s]), want);
      raw.insert(raw.end(), decoded.begin(), decoded.end());
    }
  }

  // Samples in native order, then undo horizontal differencing.
  const std::size_t samples_per_row = std::size_t{width} * spp;
  std::vector<std::uint16_t> samples(samples_per_row * height);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (bytes_per_sample == 1) {
      samples[i] = raw[i];
    } else {
      const std::uint8_t b0 = raw[2 * i];
      const std::uint8_t b1 = raw[2 * i + 1];
      samples[i] = big ? static_cast<std::uint16_t>(b0 << 8 | b1) : static_cast<std::uint16_t>(b1 << 8 | b0);
    }
  }
  if (predictor == 2) {
    const std::uint16_t wrap = bps == 8 ? 0xff : 0xffff;
    for (std::size_t y = 0; y < height; ++y) {
      auto* row = samples.data() + y * samples_per_row;
      for (std::size_t i = spp; i < samples_per_row; ++i)
        row[i] = static_cast<std::uint16_t>((row[i] + row[i - spp]) & wrap);
    }
  }

  const auto w = static_cast<int>(width);
  const auto h = static_cast<int>(height);
  if (rgb) {
    const std::size_t c = static_cast<std::size_t>(*channel);
    std::vector<std::uint16_t> px(std::size_t{width} * height);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = samples[i * spp + c];
    return GrayImage(w, h, 8, std::move(px));
  }
  if (photometric == 0) {
    const std::uint16_t maxv = bps == 8 ? 255 : 65535;
    for (auto& v : samples) v = static_cast<std::uint16_t>(maxv - v);
  }
  return GrayImage(w, h, static_cast<int>(bps), std::move(samples));
}

std::vector<std::uint8_t> encode_tiff(const GrayImage& img) {
  if (img.empty()) throw ValueError("cannot encode an empty image");
  const std::size_t bytes_per_sample = img.bit_depth() / 8;
  const auto data_bytes = static_cast<std::uint32_t>(img.size() * bytes_per_sample);
  struct Field {
    std::uint16_t tag, type;
    std::uint32_t value;
  };
  constexpr std::uint16_t kShort = 3, kLong = 4;
  const std::array<Field, 10> fields{{
      {kImageWidth, kLong, static_cast<std::uint32_t>(img.width())},
      {kImageLength, kLong, static_cast<std::uint32_t>(img.height())},
      {kBitsPerSample, kShort, static_cast<std::uint32_t>(img.bit_depth())},
      {kCompression, kShort, kCompressionNone},
      {kPhotometric, kShort, 1},
      {kStripOffsets, kLong, 0},  // patched below
      {kSamplesPerPixel, kShort, 1},
      {kRowsPerStrip, kLong, static_cast<std::uint32_t>(img.height())},
      {kStripByteCounts, kLong, data_bytes},
      {kPlanarConfig, kShort, 1},
  }};
  const std::uint32_t ifd_offset = 8;
  const auto data_offset = static_cast<std::uint32_t>(ifd_offset + 2 + 12 * fields.size() + 4);

  std::vector<std::uint8_t> out{'I', 'I'};
  out.reserve(data_offset + data_bytes);
  put_u16(out, 42);
  put_u32(out, ifd_offset);
  put_u16(out, static_cast<std::uint16_t>(fields.size()));
  for (const auto& f : fields) {
    put_u16(out, f.tag);
    put_u16(out, f.type);
    put_u32(out, 1);
    const std::uint32_t v = f.tag == kStripOffsets ? data_offset : f.value;
    if (f.type == kShort) {
      put_u16(out, static_cast<std::uint16_t>(v));
      put_u16(out, 0);
    } else {
      put_u32(out, v);
    }
  }
  put_u32(out, 0);
  for (auto v : img.pixels()) {
    if (bytes_per_sample == 1)
      out.push_back(static_cast<std::uint8_t>(v));
    else
      put_u16(out, v);
  }
  return out;
}

}  // namespace synapcount
