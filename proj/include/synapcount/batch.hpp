#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "synapcount/detect.hpp"

namespace synapcount {

struct BatchConfig {
  AnalysisConfig analysis;
  std::string red_suffix = "_red.tif";
  std::string green_suffix = "_green.tif";
  std::string traces_suffix = "_traces.ndf";

  /// Checks the analysis bounds and that the suffixes are non-empty and distinct.
  void validate() const;
  friend bool operator==(const BatchConfig&, const BatchConfig&) = default;
};

std::string config_to_json(const BatchConfig& cfg);
/// Strict parse: unknown or missing fields raise SchemaError, bounds raise ValueError.
BatchConfig config_from_json(std::string_view text);
/// The "analysis" object alone (same rules as inside a BatchConfig).
AnalysisConfig analysis_config_from_json(std::string_view text);
std::string analysis_config_to_json(const AnalysisConfig& cfg);

void save_config(const BatchConfig& cfg, const std::filesystem::path& path);
BatchConfig load_config(const std::filesystem::path& path);

struct ImageGroup {
  std::string stem;
  std::filesystem::path red;
  std::filesystem::path green;
  std::filesystem::path traces;
  friend bool operator==(const ImageGroup&, const ImageGroup&) = default;
};

struct GroupDiscovery {
  std::vector<ImageGroup> groups;     ///< sorted by stem
  std::vector<std::string> warnings;  ///< one per incomplete stem
};

/// One level of `dir`; a group exists iff all three suffix files share a stem.
GroupDiscovery discover_groups(const std::filesystem::path& dir, const BatchConfig& cfg);

struct NeuronOutcome {
  std::string stem;
  std::optional<NeuronReport> report;
  std::string error;  ///< set when the group failed
};

struct BatchReport {
  std::vector<NeuronOutcome> neurons;  ///< sorted by stem
  std::vector<std::string> warnings;
  double mean_count = 0.0;
  std::optional<double> mean_density;  ///< over neurons with a defined global density

  std::size_t succeeded() const;
  std::size_t failed() const;
};

/// Loads one group's files and runs analyze; the single-neuron code path shared by the CLI.
NeuronReport analyze_files(const std::filesystem::path& red, const std::filesystem::path& green,
                           const std::filesystem::path& traces, const AnalysisConfig& config);

/// Analyzes every discovered group with `cfg.analysis`. Groups run concurrently;
/// a failing group is recorded and does not stop the others. Throws
/// ValueError("no groups") when the directory holds no complete group.
BatchReport run_batch(const std::filesystem::path& dir, const BatchConfig& cfg);

/// `neuron` column followed by the report columns, one section per neuron,
/// then a `mean` row with the aggregate count and density.
std::string batch_to_csv(const BatchReport& report);

}  // namespace synapcount
