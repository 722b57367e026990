#pragma once

// Scenario execution: integrate, analyze, check invariants and write a run
// directory (trace.csv, events.jsonl, report.jsonl, config.txt, manifest.txt
// and SVG plots).
//
// Relative output directories resolve against $TMHF_OUTPUT_ROOT, or ./runs
// when the variable is unset.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tmhf/config.hpp"
#include "tmhf/diagnostics.hpp"
#include "tmhf/trace.hpp"

namespace tmhf {

inline constexpr const char* kOutputRootEnv = "TMHF_OUTPUT_ROOT";

struct InvariantCheck {
    std::string name;
    bool passed = true;
    double worst = 0.0;
    std::string detail;
};

struct Analysis {
    LimitReport limits;
    LojasiewiczFit lojasiewicz;
    std::vector<InvariantCheck> checks;
    double metric_length_constant = 0.0;  // measured C(eta); must stay <= eta
    double min_inj_radius = 0.0;
    double min_speed = 0.0;
    double final_speed = 0.0;
    double min_tracking_slack = 0.0;
    std::int64_t final_winding = 0;

    bool ok() const;
};

Analysis analyze(const ScenarioConfig& config, const FlowTrace& trace);

struct RunArtifacts {
    std::filesystem::path run_dir;
    std::filesystem::path trace_file;
    std::filesystem::path events_file;
    std::filesystem::path report_file;
    std::filesystem::path config_file;
    std::filesystem::path manifest_file;
    std::vector<std::filesystem::path> plot_files;
    std::vector<std::string> warnings;

    FlowTrace trace;
    Analysis analysis;
    std::string error;                   // integrator or I/O failure
    std::optional<FlowState> last_good;  // set on step underflow
    int exit_code = 0;                   // 0 ok, 1 invariant violation, 2 failure
};

std::filesystem::path output_root();
std::filesystem::path resolve_run_dir(const ScenarioConfig& config);

/// Never throws for integrator failures; the manifest is always written.
RunArtifacts run_scenario(const ScenarioConfig& config);

/// Runs independent scenarios on up to `threads` worker threads. Results keep
/// the input order.
std::vector<RunArtifacts> run_sweep(const std::vector<ScenarioConfig>& configs, unsigned threads);

struct LoadedRun {
    ScenarioConfig config;
    FlowTrace trace;
};

/// Reads config.txt, trace.csv, events.jsonl and the status line of manifest.txt.
/// energy_gap and speed are recomputed from the stored states.
LoadedRun load_run(const std::filesystem::path& dir);

/// Recomputes the analysis of a run directory and rewrites report.jsonl.
Analysis report_run(const std::filesystem::path& dir, std::ostream& out);

/// Re-emits the plots of a run directory.
std::vector<std::filesystem::path> plot_run(const std::filesystem::path& dir, std::ostream& warn);

/// Human-readable summary printed by the CLI.
std::string summarize(const ScenarioConfig& config, const FlowTrace& trace, const Analysis& analysis);

}  // namespace tmhf
