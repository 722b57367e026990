#pragma once

// Scenario configuration: flat `key = value` text with dotted sections
// (curve.*, profile.*, flow.*, initial.*, analysis.*, output.*).
//
//   # comment
//   scenario = "winding-dehn"        # preset to start from, or "custom"
//   flow.t_max = 2000
//   flow.level_offsets = [0, 0.5]
//   curve.deck = [1, -1, 0, 1]
//   initial.on_curve = false         # start off the curve at (a0, b0)
//   initial.a0 = -0.5
//   initial.b0 = 2.5
//
// Values are double-quoted strings, numbers, true/false, or bracketed lists
// of numbers. Unknown and repeated keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tmhf/flow.hpp"
#include "tmhf/target.hpp"

namespace tmhf {

struct InitialData {
    double z0 = 0.0;
    std::optional<TeichPoint> point;  // defaults to G_{z0}

    friend bool operator==(const InitialData&, const InitialData&) = default;
};

struct AnalysisConfig {
    double tail_fraction = 0.5;
    double limit_tolerance = 1e-2;

    friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct OutputConfig {
    std::string dir;  // relative paths resolve against the output root
    bool plots = true;

    friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ScenarioConfig {
    std::string scenario = "custom";
    std::uint64_t seed = 1;
    ModuliCurve curve;
    CouplingProfile profile;
    FlowConfig flow;
    InitialData initial;
    AnalysisConfig analysis;
    OutputConfig output;

    FlowState initial_state() const;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Names accepted by the `scenario` key besides "custom".
std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
ScenarioConfig preset(std::string_view name);

/// Parses and validates; defaults come from the named preset.
ScenarioConfig parse_config(std::string_view text);
/// Writes every key; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);
/// Throws ConfigError naming the violated invariant.
void validate_config(const ScenarioConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace tmhf
