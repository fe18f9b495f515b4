#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "synapcount/detect.hpp"
#include "synapcount/raster.hpp"

namespace synapcount {

inline constexpr std::string_view kCsvHeader = "dendrite,length_px,length_um,synapses,density_per_100um";

/// Results table: header, one row per dendrite in id order, then the `all` row.
/// Lengths and densities use two decimals; zero-length densities print `NA`.
std::string to_csv(const NeuronReport& report);

/// Quotes a CSV field when it holds a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

/// Splits one CSV record (no embedded newlines) honouring quotes.
std::vector<std::string> parse_csv_record(std::string_view line);

/// Lossless JSON export with a fixed key order.
std::string to_json(const NeuronReport& report);
NeuronReport report_from_json(std::string_view text);

/// r, g = marker intensities (8-bit), b = 255 inside the region, 0 outside.
RgbImage render_region_overlay(const GrayImage& red, const GrayImage& green, const Mask& region);

/// Draws a pure-blue plus sign with 5-pixel arms at each centroid's pixel, clipped to the frame.
RgbImage render_marked_synapses(const RgbImage& base, const std::vector<Point>& centroids);

/// Region overlay with every candidate pixel painted pure red.
RgbImage render_candidate_preview(const GrayImage& red, const GrayImage& green, const Mask& region,
                                  const Mask& candidates);

inline constexpr Rgb kCrossColor{0, 0, 255};
inline constexpr Rgb kCandidateColor{255, 0, 0};
inline constexpr int kCrossArm = 5;

}  // namespace synapcount
