#include "synapcount/traces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include <json.hpp>

#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"
#include "synapcount/kernels.hpp"

namespace synapcount {

namespace {

constexpr std::string_view kNdfHeader = "// NeuronJ Data File";
constexpr std::string_view kNdfEnd = "// End of NeuronJ Data File";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_int(std::string_view s) {
  int v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

void collapse_duplicates(std::vector<Point>& pts) {
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

// Sections NeuronJ always writes and that carry nothing we use.
bool is_known_ignored_section(std::string_view line) {
  return starts_with(line, "// Parameters") || starts_with(line, "// Type names") ||
         starts_with(line, "// Cluster names");
}

}  // namespace

const DendriteTrace* TraceSet::find(int id) const {
  for (const auto& t : traces)
    if (t.id == id) return &t;
  return nullptr;
}

TraceSet parse_ndf(std::string_view text, std::vector<std::string>* warnings) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  enum class State { skip, attributes, segment };
  State state = State::skip;
  TraceSet set;
  set.source = "ndf";
  std::set<int> ids;

  std::optional<DendriteTrace> tracing;
  std::size_t tracing_line = 0;
  std::vector<double> coords;
  std::size_t segment_line = 0;

  auto close_segment = [&]() {
    if (state != State::segment) return;
    if (coords.size() % 2 != 0)
      throw ParseError("odd coordinate count (" + std::to_string(coords.size()) + ") in segment", segment_line);
    for (std::size_t i = 0; i < coords.size(); i += 2) tracing->points.push_back({coords[i], coords[i + 1]});
    coords.clear();
  };
  auto close_tracing = [&]() {
    close_segment();
    if (!tracing) return;
    collapse_duplicates(tracing->points);
    if (tracing->points.empty())
      throw ParseError("tracing " + std::to_string(tracing->id) + " has no points", tracing_line);
    if (tracing->name.empty()) tracing->name = "N" + std::to_string(tracing->id);
    set.traces.push_back(std::move(*tracing));
    tracing.reset();
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool ended = false;
  while (pos <= text.size() && !ended) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);

    if (line_no == 1) {
      if (!starts_with(line, kNdfHeader)) throw ParseError("missing NeuronJ header '// NeuronJ Data File'", 1);
      continue;
    }
    if (line.empty()) continue;

    if (starts_with(line, "//")) {
      if (starts_with(line, "// Tracing")) {
        close_tracing();
        auto id_text = trim(line.substr(std::string_view("// Tracing").size()));
        if (!id_text.empty() && (id_text[0] == 'N' || id_text[0] == 'n')) id_text.remove_prefix(1);
        const auto id = parse_int(id_text);
        if (!id) throw ParseError("tracing header without an integer id: '" + std::string(line) + "'", line_no);
        if (!ids.insert(*id).second) throw ParseError("duplicate tracing id " + std::to_string(*id), line_no);
        tracing = DendriteTrace{*id, {}, {}};
        tracing_line = line_no;
        state = State::attributes;
      } else if (starts_with(line, "// Segment")) {
        if (!tracing) throw ParseError("segment outside of a tracing", line_no);
        close_segment();
        segment_line = line_no;
        state = State::segment;
      } else if (starts_with(line, kNdfEnd)) {
        ended = true;
      } else {
        close_tracing();
        if (!is_known_ignored_section(line) && warnings)
          warnings->push_back("line " + std::to_string(line_no) + ": skipping unknown section '" + std::string(line) + "'");
        state = State::skip;
      }
      continue;
    }

    switch (state) {
      case State::skip:
        break;
      case State::attributes:
        // Numeric lines are id/type/cluster attributes; text is the label.
        if (!parse_number(line)) tracing->name = std::string(line);
        break;
      case State::segment: {
        const auto v = parse_number(line);
        if (!v) throw ParseError("non-numeric coordinate '" + std::string(line) + "'", line_no);
        if (*v < 0) throw ParseError("negative coordinate " + std::string(line), line_no);
        coords.push_back(*v);
        break;
      }
    }
  }
  close_tracing();
  if (set.traces.empty()) throw ParseError("no traces");
  return set;
}

TraceSet parse_traces_json(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("", "expected an object with a 'traces' array");
  if (!doc.contains("traces")) throw SchemaError("traces", "missing field");
  const auto& arr = doc["traces"];
  if (!arr.is_array()) throw SchemaError("traces", "expected an array");
  if (arr.empty()) throw SchemaError("traces", "at least one trace is required");

  TraceSet set;
  set.source = "json";
  if (doc.contains("source")) {
    if (!doc["source"].is_string()) throw SchemaError("source", "expected a string");
    set.source = doc["source"].get<std::string>();
  }
  std::set<int> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "traces[" + std::to_string(i) + "]";
    const auto& t = arr[i];
    if (!t.is_object()) throw SchemaError(path, "expected an object");
    if (!t.contains("id") || !t["id"].is_number_integer()) throw SchemaError(path + ".id", "expected an integer");
    const auto id64 = t["id"].get<std::int64_t>();
    if (id64 < std::numeric_limits<int>::min() || id64 > std::numeric_limits<int>::max())
      throw SchemaError(path + ".id", "out of range");
    DendriteTrace trace;
    trace.id = static_cast<int>(id64);
    if (!ids.insert(trace.id).second) throw SchemaError(path + ".id", "duplicate id " + std::to_string(trace.id));
    if (t.contains("name")) {
      if (!t["name"].is_string()) throw SchemaError(path + ".name", "expected a string");
      trace.name = t["name"].get<std::string>();
    }
    if (!t.contains("points") || !t["points"].is_array()) throw SchemaError(path + ".points", "expected an array");
    const auto& pts = t["points"];
    if (pts.empty()) throw SchemaError(path + ".points", "at least one point is required");
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const std::string ppath = path + ".points[" + std::to_string(k) + "]";
      const auto& p = pts[k];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw SchemaError(ppath, "expected an [x, y] pair of numbers");
      const Point pt{p[0].get<double>(), p[1].get<double>()};
      if (!std::isfinite(pt.x) || !std::isfinite(pt.y) || pt.x < 0 || pt.y < 0)
        throw SchemaError(ppath, "coordinates must be finite and non-negative");
      trace.points.push_back(pt);
    }
    collapse_duplicates(trace.points);
    set.traces.push_back(std::move(trace));
  }
  return set;
}

std::string traces_to_json(const TraceSet& set) {
  nlohmann::ordered_json doc;
  doc["source"] = set.source;
  auto& arr = doc["traces"] = nlohmann::ordered_json::array();
  for (const auto& t : set.traces) {
    nlohmann::ordered_json jt;
    jt["id"] = t.id;
    jt["name"] = t.name;
    auto& pts = jt["points"] = nlohmann::ordered_json::array();
    for (const auto& p : t.points) pts.push_back({p.x, p.y});
    arr.push_back(std::move(jt));
  }
  return doc.dump();
}

std::string traces_to_ndf(const TraceSet& set) {
  auto number = [](double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) return std::to_string(static_cast<long long>(v));
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
  };
  std::string out = "// NeuronJ Data File - DO NOT CHANGE\n1.5.0\n";
  for (const auto& t : set.traces) {
    out += "// Tracing N" + std::to_string(t.id) + "\n";
    out += std::to_string(t.id) + "\n0\n0\n";
    out += (t.name.empty() ? "Default" : t.name) + "\n";
    out += "// Segment 1 of Tracing N" + std::to_string(t.id) + "\n";
    for (const auto& p : t.points) out += number(p.x) + "\n" + number(p.y) + "\n";
  }
  out += "// End of NeuronJ Data File\n";
  return out;
}

TraceSet parse_traces(std::string_view text, std::vector<std::string>* warnings) {
  auto body = text;
  if (body.substr(0, 3) == "\xEF\xBB\xBF") body.remove_prefix(3);
  if (starts_with(trim(body.substr(0, 64)), "//")) return parse_ndf(text, warnings);
  return parse_traces_json(text);
}

TraceSet load_traces(const std::string& path, std::vector<std::string>* warnings) {
  const auto bytes = read_file(path);
  const std::string text(bytes.begin(), bytes.end());
  const auto name = std::filesystem::path(path).filename().string();
  try {
    auto set = parse_traces(text, warnings);
    set.source = name;
    return set;
  } catch (const ParseError& e) {
    throw ParseError(name + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(e.path(), name + ": " + std::string(e.what()));
  }
}

double trace_length_px(const DendriteTrace& trace) {
  double total = 0.0;
  for (std::size_t i = 1; i < trace.points.size(); ++i)
    total += std::hypot(trace.points[i].x - trace.points[i - 1].x, trace.points[i].y - trace.points[i - 1].y);
  return total;
}

double px_to_microns(double length_px, double scale_um_per_px) {
  if (!(scale_um_per_px > 0)) throw ValueError("scale must be positive");
  return length_px * scale_um_per_px;
}

Mask rasterize_tube(const DendriteTrace& trace, double thickness_px, int width, int height) {
  if (!(thickness_px > 0) || !std::isfinite(thickness_px)) throw ValueError("thickness must be positive");
  if (width <= 0 || height <= 0) throw ValueError("mask size must be positive");
  Mask mask(width, height);
  if (trace.points.empty()) return mask;
  const auto segments = kernels::segments_of(trace);
  kernels::parallel::rasterize_tube(segments, thickness_px / 2.0, mask);
  return mask;
}

bool trace_leaves_frame(const DendriteTrace& trace, int width, int height) {
  return std::any_of(trace.points.begin(), trace.points.end(), [&](const Point& p) {
    return p.x < 0 || p.y < 0 || p.x >= width || p.y >= height;
  });
}

Mask union_masks(const std::vector<Mask>& masks) {
  if (masks.empty()) throw ValueError("union of an empty mask list");
  Mask out = masks.front();
  for (std::size_t i = 1; i < masks.size(); ++i) {
    if (!masks[i].same_shape(out)) throw DimensionMismatch("cannot union masks of different sizes");
    auto dst = out.bits();
    const auto src = masks[i].bits();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] |= src[k];
  }
  return out;
}

double distance_to_polyline(const DendriteTrace& trace, Point p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : kernels::segments_of(trace)) best = std::min(best, kernels::squared_distance_to_segment(s, p));
  return std::sqrt(best);
}

}  // namespace synapcount
