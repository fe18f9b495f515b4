#pragma once

// JSON mapping of AnalysisConfig, shared by the report and batch modules.

#include <string>

#include <json.hpp>

#include "synapcount/detect.hpp"

namespace synapcount::detail {

using ordered_json = nlohmann::ordered_json;

ordered_json analysis_to_json(const AnalysisConfig& cfg);

/// Strict: unknown keys and wrong types raise SchemaError prefixed with `path`,
/// out-of-range values raise ValueError.
AnalysisConfig analysis_from_json(const nlohmann::json& j, const std::string& path);

/// Parses text into a json value, turning syntax errors into ParseError.
nlohmann::json parse_json(std::string_view text);

}  // namespace synapcount::detail
