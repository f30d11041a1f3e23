#pragma once

#include "curveshift/pipeline.hpp"
#include "curveshift/sample.hpp"
#include "curveshift/simulation.hpp"

#include <json.hpp>

#include <string>

namespace curveshift {

using ordered_json = nlohmann::ordered_json;

Orientation orientation_from_string(const std::string& name);
const char* orientation_name(Orientation o);

/// One numeric column, header line optional. Concave orientation negates
/// the values and records the flag. Throws ParseError (with line number)
/// and TooFewRows.
Sample ingest_csv(const std::string& path, Orientation orientation);

/// Merge settings from a JSON config file into `config`. Unknown keys are
/// rejected. CLI flags are applied afterwards and win.
void apply_config_file(const std::string& path, PipelineConfig& config);

ordered_json config_json(const PipelineConfig& config);

/// Machine-readable report of a full test run; key order is fixed so a
/// given (input, seed) pair serializes byte-identically.
ordered_json report_json(const PipelineResult& result, const PipelineConfig& config);

ordered_json scenario_json(const ScenarioSpec& spec, const ScenarioResult& result,
                           std::uint64_t seed);

void write_text_file(const std::string& path, const std::string& text);

} // namespace curveshift
