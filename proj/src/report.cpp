#include "synapcount/report.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "json_util.hpp"
#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"

namespace synapcount {

namespace detail {

ordered_json analysis_to_json(const AnalysisConfig& cfg) {
  ordered_json j;
  j["scale"] = cfg.scale;
  j["thickness"] = cfg.thickness;
  j["threshold_red"] = cfg.threshold_red;
  j["threshold_green"] = cfg.threshold_green;
  j["min_area"] = cfg.min_area;
  j["connectivity"] = static_cast<int>(cfg.connectivity);
  j["mode"] = to_string(cfg.mode);
  return j;
}

AnalysisConfig analysis_from_json(const nlohmann::json& j, const std::string& path) {
  static const std::set<std::string> known{"scale",    "thickness",    "threshold_red", "threshold_green",
                                           "min_area", "connectivity", "mode"};
  auto field = [&](const std::string& key) { return path.empty() ? key : path + "." + key; };
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw SchemaError(field(key), "unknown field");

  auto number = [&](const char* key) {
    if (!j.contains(key)) throw SchemaError(field(key), "missing field");
    if (!j[key].is_number()) throw SchemaError(field(key), "expected a number");
    return j[key].get<double>();
  };
  auto integer = [&](const char* key, std::optional<int> fallback) {
    if (!j.contains(key)) {
      if (fallback) return *fallback;
      throw SchemaError(field(key), "missing field");
    }
    if (!j[key].is_number_integer()) throw SchemaError(field(key), "expected an integer");
    const auto v = j[key].get<std::int64_t>();
    if (v < -1'000'000 || v > 1'000'000) throw ValueError(field(key) + " out of range");
    return static_cast<int>(v);
  };

  AnalysisConfig cfg;
  cfg.scale = number("scale");
  cfg.thickness = number("thickness");
  cfg.threshold_red = integer("threshold_red", std::nullopt);
  cfg.threshold_green = integer("threshold_green", std::nullopt);
  cfg.min_area = integer("min_area", 1);
  cfg.connectivity = parse_connectivity(integer("connectivity", 8));
  if (j.contains("mode")) {
    if (!j["mode"].is_string()) throw SchemaError(field("mode"), "expected a string");
    cfg.mode = parse_mode(j["mode"].get<std::string>());
  } else {
    cfg.mode = AnalysisMode::global;
  }
  cfg.validate();
  return cfg;
}

nlohmann::json parse_json(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace detail

namespace {

using detail::ordered_json;

std::string fixed2(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return ec == std::errc() ? std::string(buf, end) : std::string("NA");
}

void append_row(std::string& out, const DendriteResult& r) {
  out += csv_field(r.label());
  out += ',';
  out += fixed2(r.length_px);
  out += ',';
  out += fixed2(r.length_um);
  out += ',';
  out += std::to_string(r.synapse_count);
  out += ',';
  out += r.density_per_100um ? fixed2(*r.density_per_100um) : "NA";
  out += '\n';
}

ordered_json result_to_json(const DendriteResult& r) {
  ordered_json j;
  j["dendrite"] = r.label();
  j["id"] = r.dendrite_id ? ordered_json(*r.dendrite_id) : ordered_json(nullptr);
  j["name"] = r.name;
  j["length_px"] = r.length_px;
  j["length_um"] = r.length_um;
  j["synapses"] = r.synapse_count;
  j["density_per_100um"] = r.density_per_100um ? ordered_json(*r.density_per_100um) : ordered_json(nullptr);
  j["clipped"] = r.clipped;
  return j;
}

template <typename T>
T required(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(path + "." + key, "missing field");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(path + "." + key, "wrong type");
  }
}

template <typename T>
std::optional<T> nullable(const nlohmann::json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(path + "." + key, "missing field");
  if (j.at(key).is_null()) return std::nullopt;
  return required<T>(j, key, path);
}

DendriteResult result_from_json(const nlohmann::json& j, const std::string& path) {
  DendriteResult r;
  r.dendrite_id = nullable<int>(j, "id", path);
  r.name = required<std::string>(j, "name", path);
  r.length_px = required<double>(j, "length_px", path);
  r.length_um = required<double>(j, "length_um", path);
  r.synapse_count = required<long>(j, "synapses", path);
  r.density_per_100um = nullable<double>(j, "density_per_100um", path);
  r.clipped = required<bool>(j, "clipped", path);
  return r;
}

void check_same_size(const GrayImage& red, const GrayImage& green, const Mask& region) {
  if (red.width() != green.width() || red.height() != green.height() || red.width() != region.width() ||
      red.height() != region.height())
    throw DimensionMismatch("overlay inputs must share dimensions");
}

}  // namespace

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_csv_record(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r' && c != '\n') {
      fields.back() += c;
    }
  }
  return fields;
}

std::string to_csv(const NeuronReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : report.per_dendrite) append_row(out, r);
  append_row(out, report.global);
  return out;
}

std::string to_json(const NeuronReport& report) {
  ordered_json j;
  j["inputs"] = {{"red", report.inputs.red}, {"green", report.inputs.green}, {"traces", report.inputs.traces}};
  j["width"] = report.width;
  j["height"] = report.height;
  j["config"] = detail::analysis_to_json(report.config);
  j["global"] = result_to_json(report.global);
  auto& per = j["per_dendrite"] = ordered_json::array();
  for (const auto& r : report.per_dendrite) per.push_back(result_to_json(r));
  auto& syn = j["synapses"] = ordered_json::array();
  for (const auto& s : report.synapses) {
    ordered_json js;
    js["id"] = s.id;
    js["area"] = s.area;
    js["x"] = s.centroid.x;
    js["y"] = s.centroid.y;
    js["bbox"] = {s.bbox.x0, s.bbox.y0, s.bbox.x1, s.bbox.y1};
    js["dendrite_id"] = s.dendrite_id ? ordered_json(*s.dendrite_id) : ordered_json(nullptr);
    syn.push_back(std::move(js));
  }
  return j.dump();
}

NeuronReport report_from_json(std::string_view text) {
  const auto j = detail::parse_json(text);
  if (!j.is_object()) throw SchemaError("", "expected a report object");
  NeuronReport r;
  if (!j.contains("inputs")) throw SchemaError("inputs", "missing field");
  const auto& in = j["inputs"];
  r.inputs = {required<std::string>(in, "red", "inputs"), required<std::string>(in, "green", "inputs"),
              required<std::string>(in, "traces", "inputs")};
  r.width = required<int>(j, "width", "");
  r.height = required<int>(j, "height", "");
  if (!j.contains("config")) throw SchemaError("config", "missing field");
  r.config = detail::analysis_from_json(j["config"], "config");
  if (!j.contains("global")) throw SchemaError("global", "missing field");
  r.global = result_from_json(j["global"], "global");
  if (!j.contains("per_dendrite") || !j["per_dendrite"].is_array()) throw SchemaError("per_dendrite", "expected an array");
  for (std::size_t i = 0; i < j["per_dendrite"].size(); ++i)
    r.per_dendrite.push_back(result_from_json(j["per_dendrite"][i], "per_dendrite[" + std::to_string(i) + "]"));
  if (!j.contains("synapses") || !j["synapses"].is_array()) throw SchemaError("synapses", "expected an array");
  for (std::size_t i = 0; i < j["synapses"].size(); ++i) {
    const auto& js = j["synapses"][i];
    const std::string path = "synapses[" + std::to_string(i) + "]";
    Synapse s;
    s.id = required<int>(js, "id", path);
    s.area = required<long>(js, "area", path);
    s.centroid = {required<double>(js, "x", path), required<double>(js, "y", path)};
    const auto box = required<std::vector<int>>(js, "bbox", path);
    if (box.size() != 4) throw SchemaError(path + ".bbox", "expected 4 integers");
    s.bbox = {box[0], box[1], box[2], box[3]};
    s.dendrite_id = nullable<int>(js, "dendrite_id", path);
    r.synapses.push_back(s);
  }
  return r;
}

RgbImage render_region_overlay(const GrayImage& red, const GrayImage& green, const Mask& region) {
  check_same_size(red, green, region);
  const auto r8 = normalize_to_8bit(red);
  const auto g8 = normalize_to_8bit(green);
  RgbImage out(red.width(), red.height());
  auto px = out.pixels();
  const auto rp = r8.pixels();
  const auto gp = g8.pixels();
  const auto bits = region.bits();
  for (std::size_t i = 0; i < px.size(); ++i)
    px[i] = {static_cast<std::uint8_t>(rp[i]), static_cast<std::uint8_t>(gp[i]),
             static_cast<std::uint8_t>(bits[i] ? 255 : 0)};
  return out;
}

RgbImage render_marked_synapses(const RgbImage& base, const std::vector<Point>& centroids) {
  RgbImage out = base;
  for (const auto& c : centroids) {
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) continue;
    // The pixel whose square contains the centroid.
    const auto cx = static_cast<long long>(std::floor(c.x));
    const auto cy = static_cast<long long>(std::floor(c.y));
    auto plot = [&](long long x, long long y) {
      if (x >= 0 && y >= 0 && x < out.width() && y < out.height())
        out.set(static_cast<int>(x), static_cast<int>(y), kCrossColor);
    };
    for (int k = -kCrossArm; k <= kCrossArm; ++k) {
      plot(cx + k, cy);
      plot(cx, cy + k);
    }
  }
  return out;
}

RgbImage render_candidate_preview(const GrayImage& red, const GrayImage& green, const Mask& region,
                                  const Mask& candidates) {
  if (!candidates.same_shape(region)) throw DimensionMismatch("candidate mask and region differ in size");
  RgbImage out = render_region_overlay(red, green, region);
  const auto bits = candidates.bits();
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i)
    if (bits[i]) px[i] = kCandidateColor;
  return out;
}

}  // namespace synapcount
