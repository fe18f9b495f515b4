#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "synapcount/raster.hpp"

namespace synapcount {

/// Image-plane coordinate in pixels. Pixel (i, j) covers [i, i+1) x [j, j+1),
/// so its centre is (i + 0.5, j + 0.5).
struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct DendriteTrace {
  int id = 0;
  std::string name;
  std::vector<Point> points;
  friend bool operator==(const DendriteTrace&, const DendriteTrace&) = default;
};

struct TraceSet {
  std::vector<DendriteTrace> traces;
  std::string source;

  const DendriteTrace* find(int id) const;
  friend bool operator==(const TraceSet&, const TraceSet&) = default;
};

/// Parses the supported NeuronJ NDF subset. Unknown `//` sections are skipped
/// (their names are appended to `warnings` when given). Throws ParseError
/// carrying the offending line number.
TraceSet parse_ndf(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Parses `{"traces":[{"id":int,"name":string,"points":[[x,y],...]}]}`.
/// Throws SchemaError naming the offending field path.
TraceSet parse_traces_json(std::string_view text);
std::string traces_to_json(const TraceSet& set);

/// NDF text with one segment per tracing. Coordinates are written as integers
/// when integral, otherwise with full precision.
std::string traces_to_ndf(const TraceSet& set);

/// Dispatches on content: NDF when the text starts with the NDF header, JSON otherwise.
TraceSet parse_traces(std::string_view text, std::vector<std::string>* warnings = nullptr);
TraceSet load_traces(const std::string& path, std::vector<std::string>* warnings = nullptr);

double trace_length_px(const DendriteTrace& trace);

/// length_px * scale. Throws ValueError when scale <= 0.
double px_to_microns(double length_px, double scale_um_per_px);

/// Pixels whose centre lies within thickness_px / 2 (closed) of the polyline.
/// Throws ValueError when thickness_px <= 0 or the size is not positive.
Mask rasterize_tube(const DendriteTrace& trace, double thickness_px, int width, int height);

/// True when any trace point falls outside [0, width) x [0, height).
bool trace_leaves_frame(const DendriteTrace& trace, int width, int height);

/// Pixelwise OR. Throws DimensionMismatch on unequal sizes, ValueError on an empty list.
Mask union_masks(const std::vector<Mask>& masks);

/// Euclidean distance from `p` to the closest point of the polyline.
double distance_to_polyline(const DendriteTrace& trace, Point p);

}  // namespace synapcount
