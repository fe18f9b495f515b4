#pragma once

// Data-parallel inner loops of the pipeline. Every kernel has a plain serial
// implementation and an OpenMP one; both must produce identical output. The
// library calls the parallel variants, tests and benchmarks compare the two.

#include <cstdint>
#include <span>
#include <vector>

#include "synapcount/raster.hpp"
#include "synapcount/traces.hpp"

namespace synapcount::kernels {

/// Straight piece of a polyline.
struct Segment {
  Point a;
  Point b;
};

/// Splits a polyline into segments; a single point becomes a degenerate segment.
std::vector<Segment> segments_of(const DendriteTrace& trace);

/// Squared distance from `p` to the closed segment [a, b].
double squared_distance_to_segment(const Segment& s, Point p);

/// Raw output of connected-component labeling.
struct Labeling {
  int count = 0;
  /// Row-major, 0 = background, components numbered 1..count in raster-scan
  /// order of their first pixel.
  std::vector<std::int32_t> labels;
};

namespace serial {

void normalize_full_range(std::span<const std::uint16_t> in, std::span<std::uint16_t> out);
void normalize_min_max(std::span<const std::uint16_t> in, std::span<std::uint16_t> out);
void colocalize(std::span<const std::uint16_t> red, std::span<const std::uint16_t> green,
                std::span<const std::uint8_t> region, int t_red, int t_green, std::span<std::uint8_t> out);
/// ORs the tube of `segments` (radius `radius`) into `mask`.
void rasterize_tube(std::span<const Segment> segments, double radius, Mask& mask);
/// Classic two-pass labeling with an equivalence table.
Labeling label_components(const Mask& mask, int connectivity);

}  // namespace serial

namespace parallel {

void normalize_full_range(std::span<const std::uint16_t> in, std::span<std::uint16_t> out);
void normalize_min_max(std::span<const std::uint16_t> in, std::span<std::uint16_t> out);
void colocalize(std::span<const std::uint16_t> red, std::span<const std::uint16_t> green,
                std::span<const std::uint8_t> region, int t_red, int t_green, std::span<std::uint8_t> out);
void rasterize_tube(std::span<const Segment> segments, double radius, Mask& mask);
/// Row-strip union-find labeling: strips are labeled concurrently, seams are
/// merged serially, and final ids are assigned by a parallel prefix over strips.
Labeling label_components(const Mask& mask, int connectivity);

}  // namespace parallel

}  // namespace synapcount::kernels
