#include "synapcount/batch.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "json_util.hpp"
#include "synapcount/error.hpp"
#include "synapcount/image_io.hpp"
#include "synapcount/report.hpp"

namespace synapcount {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void BatchConfig::validate() const {
  analysis.validate();
  if (red_suffix.empty() || green_suffix.empty() || traces_suffix.empty())
    throw ValueError("file suffixes must be non-empty");
  if (red_suffix == green_suffix || red_suffix == traces_suffix || green_suffix == traces_suffix)
    throw ValueError("file suffixes must be pairwise distinct");
}

std::string analysis_config_to_json(const AnalysisConfig& cfg) { return detail::analysis_to_json(cfg).dump(2); }

AnalysisConfig analysis_config_from_json(std::string_view text) {
  return detail::analysis_from_json(detail::parse_json(text), "");
}

std::string config_to_json(const BatchConfig& cfg) {
  detail::ordered_json j;
  j["analysis"] = detail::analysis_to_json(cfg.analysis);
  j["red_suffix"] = cfg.red_suffix;
  j["green_suffix"] = cfg.green_suffix;
  j["traces_suffix"] = cfg.traces_suffix;
  return j.dump(2) + "\n";
}

BatchConfig config_from_json(std::string_view text) {
  const auto j = detail::parse_json(text);
  if (!j.is_object()) throw SchemaError("", "expected a configuration object");
  static const std::set<std::string> known{"analysis", "red_suffix", "green_suffix", "traces_suffix"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) throw SchemaError(key, "unknown field");
  if (!j.contains("analysis")) throw SchemaError("analysis", "missing field");

  BatchConfig cfg;
  cfg.analysis = detail::analysis_from_json(j["analysis"], "analysis");
  auto suffix = [&](const char* key, std::string& dst) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) throw SchemaError(key, "expected a string");
    dst = j[key].get<std::string>();
  };
  suffix("red_suffix", cfg.red_suffix);
  suffix("green_suffix", cfg.green_suffix);
  suffix("traces_suffix", cfg.traces_suffix);
  cfg.validate();
  return cfg;
}

void save_config(const BatchConfig& cfg, const std::filesystem::path& path) {
  cfg.validate();
  write_file(path, config_to_json(cfg));
}

BatchConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return config_from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

GroupDiscovery discover_groups(const std::filesystem::path& dir, const BatchConfig& cfg) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw IoError("cannot read directory " + dir.string() + ": " + ec.message());

  struct Parts {
    std::optional<fs::path> red, green, traces;
  };
  // Ordered by stem so the result does not depend on enumeration order.
  std::map<std::string, Parts> stems;
  const std::vector<std::pair<const std::string*, std::optional<fs::path> Parts::*>> roles{
      {&cfg.red_suffix, &Parts::red}, {&cfg.green_suffix, &Parts::green}, {&cfg.traces_suffix, &Parts::traces}};
  for (; it != fs::directory_iterator(); it.increment(ec)) {
    if (ec) throw IoError("cannot read directory " + dir.string() + ": " + ec.message());
    if (!it->is_regular_file()) continue;
    const auto name = it->path().filename().string();
    // Longest matching suffix wins when one suffix ends another.
    const std::string* best = nullptr;
    std::optional<fs::path> Parts::*slot = nullptr;
    for (const auto& [suffix, member] : roles)
      if (ends_with(name, *suffix) && (!best || suffix->size() > best->size())) {
        best = suffix;
        slot = member;
      }
    if (!best) continue;
    stems[name.substr(0, name.size() - best->size())].*slot = it->path();
  }

  GroupDiscovery out;
  for (const auto& [stem, parts] : stems) {
    if (parts.red && parts.green && parts.traces) {
      out.groups.push_back({stem, *parts.red, *parts.green, *parts.traces});
      continue;
    }
    std::string missing;
    if (!parts.red) missing += " " + cfg.red_suffix;
    if (!parts.green) missing += " " + cfg.green_suffix;
    if (!parts.traces) missing += " " + cfg.traces_suffix;
    out.warnings.push_back("incomplete group '" + stem + "': missing" + missing);
  }
  return out;
}

std::size_t BatchReport::succeeded() const {
  return static_cast<std::size_t>(std::count_if(neurons.begin(), neurons.end(), [](const auto& n) { return n.report.has_value(); }));
}

std::size_t BatchReport::failed() const { return neurons.size() - succeeded(); }

NeuronReport analyze_files(const std::filesystem::path& red, const std::filesystem::path& green,
                           const std::filesystem::path& traces, const AnalysisConfig& config) {
  config.validate();
  // Channels only matter for RGB files: the red file yields its red plane and so on.
  const auto red_img = load_tiff(red, Channel::red);
  const auto green_img = load_tiff(green, Channel::green);
  const auto trace_set = load_traces(traces.string());
  InputFiles inputs{red.filename().string(), green.filename().string(), traces.filename().string()};
  return analyze(red_img, green_img, trace_set, config, std::move(inputs));
}

BatchReport run_batch(const std::filesystem::path& dir, const BatchConfig& cfg) {
  cfg.validate();
  auto found = discover_groups(dir, cfg);
  if (found.groups.empty()) throw ValueError("no groups in " + dir.string());

  BatchReport report;
  report.warnings = std::move(found.warnings);
  report.neurons.resize(found.groups.size());
  const auto n = static_cast<std::int64_t>(found.groups.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& g = found.groups[i];
    auto& outcome = report.neurons[i];
    outcome.stem = g.stem;
    try {
      outcome.report = analyze_files(g.red, g.green, g.traces, cfg.analysis);
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
  }

  std::vector<double> counts;
  std::vector<double> densities;
  for (const auto& o : report.neurons) {
    if (!o.report) continue;
    counts.push_back(static_cast<double>(o.report->global.synapse_count));
    if (o.report->global.density_per_100um) densities.push_back(*o.report->global.density_per_100um);
  }
  if (!counts.empty()) report.mean_count = mean_count(counts);
  if (!densities.empty()) report.mean_density = mean_count(densities);
  return report;
}

std::string batch_to_csv(const BatchReport& report) {
  std::string out = "neuron," + std::string(kCsvHeader) + "\n";
  for (const auto& o : report.neurons) {
    if (!o.report) continue;
    const auto table = to_csv(*o.report);
    const auto prefix = csv_field(o.stem) + ",";
    std::size_t pos = table.find('\n') + 1;  // skip the per-neuron header
    while (pos < table.size()) {
      const auto nl = table.find('\n', pos);
      out += prefix;
      out.append(table, pos, nl - pos + 1);
      pos = nl + 1;
    }
  }
  out += "mean,all,,," + fixed2(report.mean_count) + "," + (report.mean_density ? fixed2(*report.mean_density) : "NA") +
         "\n";
  return out;
}

}  // namespace synapcount
