#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "synapcount/raster.hpp"
#include "synapcount/traces.hpp"

namespace synapcount {

enum class Connectivity { four = 4, eight = 8 };
enum class AnalysisMode { global, per_dendrite };

std::string to_string(AnalysisMode mode);
/// "global" or "per-dendrite"; throws ValueError otherwise.
AnalysisMode parse_mode(const std::string& text);
/// 4 or 8; throws ValueError otherwise.
Connectivity parse_connectivity(int value);

struct AnalysisConfig {
  double scale = 0.09;      ///< µm per pixel
  double thickness = 1.0;   ///< mean dendrite thickness, µm
  int threshold_red = 128;
  int threshold_green = 128;
  int min_area = 1;         ///< pixels
  Connectivity connectivity = Connectivity::eight;
  AnalysisMode mode = AnalysisMode::global;

  /// Throws ValueError naming the first field out of range.
  void validate() const;
  double thickness_px() const { return thickness / scale; }

  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct BoundingBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  ///< inclusive
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Component {
  int id = 0;
  long area = 0;
  Point centroid;  ///< mean of the member pixel centres
  BoundingBox bbox;
  friend bool operator==(const Component&, const Component&) = default;
};

struct ComponentSet {
  int width = 0;
  int height = 0;
  std::vector<std::int32_t> labels;  ///< row-major, 0 = background
  std::vector<Component> components;

  int count() const { return static_cast<int>(components.size()); }
};

/// Pixel set iff region AND red >= t_red AND green >= t_green. Inputs must be
/// 8-bit; throws DimensionMismatch when the three rasters differ in size.
Mask colocalization_mask(const GrayImage& red, const GrayImage& green, const Mask& region, int t_red,
                         int t_green);

/// Maximal connected foreground regions, numbered in raster-scan discovery order.
ComponentSet connected_components(const Mask& mask, Connectivity connectivity = Connectivity::eight);

/// Drops components smaller than `min_area` and renumbers the rest 1..n in order.
ComponentSet filter_components(const ComponentSet& cs, int min_area);

struct DendriteTube {
  int dendrite_id = 0;
  Mask mask;
};

/// Assigns every component to exactly one dendrite: the unique tube holding
/// its centroid pixel, else the nearest polyline among the tubes holding it,
/// else the nearest polyline overall; ties go to the lowest id. Returns
/// dendrite id -> component ids (every tube id present, possibly empty).
std::map<int, std::vector<int>> assign_to_dendrites(const ComponentSet& cs, const std::vector<DendriteTube>& tubes,
                                                    const TraceSet& traces);

/// count / length_um * 100. Throws ValueError when length_um <= 0.
double density_per_100_micron(long count, double length_um);

/// (1 - treated / control) * 100. Throws ValueError when control_mean <= 0.
double inhibition_percentage(double control_mean, double treated_mean);

/// Arithmetic mean. Throws ValueError on an empty list.
double mean_count(const std::vector<double>& counts);

struct DendriteResult {
  std::optional<int> dendrite_id;  ///< empty for the whole-neuron row
  std::string name;
  double length_px = 0.0;
  double length_um = 0.0;
  long synapse_count = 0;
  std::optional<double> density_per_100um;  ///< empty for zero-length dendrites
  bool clipped = false;  ///< the trace runs outside the image frame

  /// "d<id>" for a dendrite, "all" for the whole neuron.
  std::string label() const;
  friend bool operator==(const DendriteResult&, const DendriteResult&) = default;
};

struct Synapse {
  int id = 0;
  long area = 0;
  Point centroid;
  BoundingBox bbox;
  std::optional<int> dendrite_id;  ///< set in per-dendrite mode
  friend bool operator==(const Synapse&, const Synapse&) = default;
};

struct InputFiles {
  std::string red;
  std::string green;
  std::string traces;
  friend bool operator==(const InputFiles&, const InputFiles&) = default;
};

struct NeuronReport {
  std::vector<DendriteResult> per_dendrite;  ///< empty in global mode
  DendriteResult global;
  AnalysisConfig config;
  InputFiles inputs;
  int width = 0;
  int height = 0;
  std::vector<Synapse> synapses;

  friend bool operator==(const NeuronReport&, const NeuronReport&) = default;
};

/// Intermediate rasters of one analysis, kept for rendering and previews.
struct Region {
  GrayImage red8;
  GrayImage green8;
  std::vector<DendriteTube> tubes;
  Mask region;
};

/// Normalizes both channels and rasterizes the dendrite tubes for `config`.
Region prepare_region(const GrayImage& red, const GrayImage& green, const TraceSet& traces,
                      const AnalysisConfig& config);

/// Counts on an already prepared region (thresholds, min_area, connectivity
/// and mode come from `config`).
NeuronReport analyze_region(const Region& region, const TraceSet& traces, const AnalysisConfig& config,
                            InputFiles inputs = {});

/// The whole single-neuron pipeline: prepare_region followed by analyze_region.
NeuronReport analyze(const GrayImage& red, const GrayImage& green, const TraceSet& traces,
                     const AnalysisConfig& config, InputFiles inputs = {});

}  // namespace synapcount
