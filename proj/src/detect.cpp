#include "synapcount/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"
#include "synapcount/kernels.hpp"

namespace synapcount {

std::string to_string(AnalysisMode mode) { return mode == AnalysisMode::global ? "global" : "per-dendrite"; }

AnalysisMode parse_mode(const std::string& text) {
  if (text == "global") return AnalysisMode::global;
  if (text == "per-dendrite") return AnalysisMode::per_dendrite;
  throw ValueError("mode must be 'global' or 'per-dendrite', got '" + text + "'");
}

Connectivity parse_connectivity(int value) {
  if (value == 4) return Connectivity::four;
  if (value == 8) return Connectivity::eight;
  throw ValueError("connectivity must be 4 or 8, got " + std::to_string(value));
}

void AnalysisConfig::validate() const {
  if (!(scale > 0) || !std::isfinite(scale)) throw ValueError("scale out of range: must be > 0");
  if (!(thickness > 0) || !std::isfinite(thickness)) throw ValueError("thickness out of range: must be > 0");
  if (threshold_red < 0 || threshold_red > 255) throw ValueError("threshold_red out of range 0..255");
  if (threshold_green < 0 || threshold_green > 255) throw ValueError("threshold_green out of range 0..255");
  if (min_area < 1) throw ValueError("min_area out of range: must be >= 1");
  if (connectivity != Connectivity::four && connectivity != Connectivity::eight)
    throw ValueError("connectivity out of range: must be 4 or 8");
}

std::string DendriteResult::label() const { return dendrite_id ? "d" + std::to_string(*dendrite_id) : "all"; }

Mask colocalization_mask(const GrayImage& red, const GrayImage& green, const Mask& region, int t_red, int t_green) {
  if (red.width() != green.width() || red.height() != green.height() || red.width() != region.width() ||
      red.height() != region.height())
    throw DimensionMismatch("red, green and region rasters must share dimensions");
  if (red.bit_depth() != 8 || green.bit_depth() != 8) throw ValueError("colocalization expects 8-bit channels");
  Mask out(region.width(), region.height());
  kernels::parallel::colocalize(red.pixels(), green.pixels(), region.bits(), t_red, t_green, out.bits());
  return out;
}

ComponentSet connected_components(const Mask& mask, Connectivity connectivity) {
  auto labeling = kernels::parallel::label_components(mask, static_cast<int>(connectivity));
  ComponentSet cs;
  cs.width = mask.width();
  cs.height = mask.height();
  cs.labels = std::move(labeling.labels);

  struct Acc {
    long area = 0;
    long long sx = 0, sy = 0;
    BoundingBox box{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
  };
  std::vector<Acc> acc(static_cast<std::size_t>(labeling.count) + 1);
  for (int y = 0; y < cs.height; ++y)
    for (int x = 0; x < cs.width; ++x) {
      const auto l = cs.labels[mask.index(x, y)];
      if (!l) continue;
      auto& a = acc[l];
      ++a.area;
      a.sx += x;
      a.sy += y;
      a.box.x0 = std::min(a.box.x0, x);
      a.box.y0 = std::min(a.box.y0, y);
      a.box.x1 = std::max(a.box.x1, x);
      a.box.y1 = std::max(a.box.y1, y);
    }
  cs.components.reserve(labeling.count);
  for (int id = 1; id <= labeling.count; ++id) {
    const auto& a = acc[id];
    const auto n = static_cast<double>(a.area);
    cs.components.push_back({id, a.area, {a.sx / n + 0.5, a.sy / n + 0.5}, a.box});
  }
  return cs;
}

ComponentSet filter_components(const ComponentSet& cs, int min_area) {
  if (min_area < 1) throw ValueError("min_area must be >= 1");
  ComponentSet out;
  out.width = cs.width;
  out.height = cs.height;
  std::vector<std::int32_t> remap(cs.components.size() + 1, 0);
  for (const auto& c : cs.components) {
    if (c.area < min_area) continue;
    auto kept = c;
    kept.id = static_cast<int>(out.components.size()) + 1;
    remap[c.id] = kept.id;
    out.components.push_back(kept);
  }
  out.labels.resize(cs.labels.size());
  std::transform(cs.labels.begin(), cs.labels.end(), out.labels.begin(), [&](std::int32_t l) { return remap[l]; });
  return out;
}

std::map<int, std::vector<int>> assign_to_dendrites(const ComponentSet& cs, const std::vector<DendriteTube>& tubes,
                                                    const TraceSet& traces) {
  if (tubes.empty()) throw ValueError("no dendrite tubes to assign components to");
  std::map<int, std::vector<int>> out;
  for (const auto& t : tubes) {
    if (!traces.find(t.dendrite_id)) throw ValueError("no trace for dendrite " + std::to_string(t.dendrite_id));
    out[t.dendrite_id];
  }

  for (const auto& c : cs.components) {
    const int px = std::clamp(static_cast<int>(std::floor(c.centroid.x)), 0, std::max(cs.width - 1, 0));
    const int py = std::clamp(static_cast<int>(std::floor(c.centroid.y)), 0, std::max(cs.height - 1, 0));
    std::vector<const DendriteTube*> holding;
    for (const auto& t : tubes)
      if (t.mask.contains(px, py) && t.mask.at(px, py)) holding.push_back(&t);
    if (holding.empty())
      for (const auto& t : tubes) holding.push_back(&t);

    int chosen = holding.front()->dendrite_id;
    if (holding.size() > 1) {
      auto best = std::make_tuple(std::numeric_limits<double>::infinity(), std::numeric_limits<int>::max());
      for (const auto* t : holding) {
        const auto key = std::make_tuple(distance_to_polyline(*traces.find(t->dendrite_id), c.centroid), t->dendrite_id);
        if (key < best) best = key;
      }
      chosen = std::get<1>(best);
    }
    out[chosen].push_back(c.id);
  }
  return out;
}

double density_per_100_micron(long count, double length_um) {
  if (!(length_um > 0)) throw ValueError("dendrite length must be positive to compute a density");
  return static_cast<double>(count) / length_um * 100.0;
}

double inhibition_percentage(double control_mean, double treated_mean) {
  if (!(control_mean > 0)) throw ValueError("control mean must be positive");
  return (1.0 - treated_mean / control_mean) * 100.0;
}

double mean_count(const std::vector<double>& counts) {
  if (counts.empty()) throw ValueError("mean of an empty list");
  double sum = 0.0;
  for (double c : counts) sum += c;
  return sum / static_cast<double>(counts.size());
}

namespace {

DendriteResult make_result(std::optional<int> id, std::string name, double length_px, long count, double scale,
                           bool clipped) {
  DendriteResult r;
  r.dendrite_id = id;
  r.name = std::move(name);
  r.length_px = length_px;
  r.length_um = px_to_microns(length_px, scale);
  r.synapse_count = count;
  if (r.length_um > 0) r.density_per_100um = density_per_100_micron(count, r.length_um);
  r.clipped = clipped;
  return r;
}

std::vector<const DendriteTrace*> by_id(const TraceSet& traces) {
  std::vector<const DendriteTrace*> out;
  for (const auto& t : traces.traces) out.push_back(&t);
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  return out;
}

}  // namespace

Region prepare_region(const GrayImage& red, const GrayImage& green, const TraceSet& traces,
                      const AnalysisConfig& config) {
  config.validate();
  if (red.width() != green.width() || red.height() != green.height())
    throw DimensionMismatch("red and green images differ in size: " + std::to_string(red.width()) + "x" +
                            std::to_string(red.height()) + " vs " + std::to_string(green.width()) + "x" +
                            std::to_string(green.height()));
  if (traces.traces.empty()) throw ValueError("no traces to analyze");

  Region out;
  out.red8 = normalize_to_8bit(red);
  out.green8 = normalize_to_8bit(green);
  const double thickness_px = config.thickness_px();
  for (const auto* t : by_id(traces))
    out.tubes.push_back({t->id, rasterize_tube(*t, thickness_px, red.width(), red.height())});
  std::vector<Mask> masks;
  masks.reserve(out.tubes.size());
  for (const auto& t : out.tubes) masks.push_back(t.mask);
  out.region = union_masks(masks);
  return out;
}

NeuronReport analyze_region(const Region& region, const TraceSet& traces, const AnalysisConfig& config,
                            InputFiles inputs) {
  config.validate();
  const auto candidates =
      colocalization_mask(region.red8, region.green8, region.region, config.threshold_red, config.threshold_green);
  const auto cs = filter_components(connected_components(candidates, config.connectivity), config.min_area);

  NeuronReport report;
  report.config = config;
  report.inputs = std::move(inputs);
  report.width = region.red8.width();
  report.height = region.red8.height();

  const auto ordered = by_id(traces);
  double total_px = 0.0;
  bool any_clipped = false;
  for (const auto* t : ordered) {
    total_px += trace_length_px(*t);
    any_clipped = any_clipped || trace_leaves_frame(*t, report.width, report.height);
  }
  report.global = make_result(std::nullopt, "all", total_px, cs.count(), config.scale, any_clipped);

  for (const auto& c : cs.components) report.synapses.push_back({c.id, c.area, c.centroid, c.bbox, std::nullopt});

  if (config.mode == AnalysisMode::per_dendrite) {
    const auto assignment = assign_to_dendrites(cs, region.tubes, traces);
    for (const auto* t : ordered) {
      const auto& ids = assignment.at(t->id);
      for (int id : ids) report.synapses[id - 1].dendrite_id = t->id;
      report.per_dendrite.push_back(make_result(t->id, t->name, trace_length_px(*t), static_cast<long>(ids.size()),
                                                config.scale, trace_leaves_frame(*t, report.width, report.height)));
    }
  }
  return report;
}

NeuronReport analyze(const GrayImage& red, const GrayImage& green, const TraceSet& traces,
                     const AnalysisConfig& config, InputFiles inputs) {
  return analyze_region(prepare_region(red, green, traces, config), traces, config, std::move(inputs));
}

}  // namespace synapcount
