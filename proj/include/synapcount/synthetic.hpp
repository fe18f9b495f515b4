#pragma once

#include <cstdint>
#include <vector>

#include "synapcount/raster.hpp"
#include "synapcount/traces.hpp"

namespace synapcount::synthetic {

/// Parameters of a generated neuron with planted ground truth.
struct NeuronSpec {
  int width = 256;
  int height = 256;
  int dendrites = 3;            ///< 1..n polylines
  int puncta = 12;              ///< colocalized discs placed on the traces
  int off_tube_distractors = 3; ///< colocalized discs placed outside every tube
  int single_channel_distractors = 3;  ///< red-only or green-only discs on the traces
  double thickness_px = 8.0;
  double punctum_radius = 1.6;
  double min_gap_px = 3.0;      ///< clearance between planted discs
  int background_max = 40;      ///< uniform noise ceiling
  int signal_min = 200;         ///< planted intensity floor
  int bit_depth = 8;
  bool horizontal = false;      ///< straight rows evenly spaced down the frame
  std::uint64_t seed = 1;
};

struct Punctum {
  Point center;
  int dendrite_id = 0;
};

struct Neuron {
  GrayImage red;
  GrayImage green;
  TraceSet traces;
  std::vector<Punctum> puncta;  ///< ground truth: every entry is one synapse
  std::vector<Point> off_tube;
  std::vector<Point> single_channel;
};

/// Deterministic for given parameters (seed included). Throws ValueError when the
/// requested puncta cannot be placed with the required clearance.
Neuron generate(const NeuronSpec& spec);

/// Thresholds separating planted signal from background for `spec`.
int calibrated_threshold(const NeuronSpec& spec);

}  // namespace synapcount::synthetic
