#include "tmhf/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tmhf/flow.hpp"
#include "tmhf/io.hpp"
#include "tmhf/plot.hpp"
#include "tmhf/version.hpp"

namespace tmhf {

namespace fs = std::filesystem;

namespace {

constexpr double kTrackingSlack = 1e-8;
constexpr double kLengthSlack = 1e-9;

bool winding_profile(const ScenarioConfig& c) {
    return c.profile.kind == ProfileKind::staircase || c.profile.kind == ProfileKind::analytic_strip;
}

nlohmann::ordered_json number_or_null(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

std::string report_jsonl(const ScenarioConfig& config, const FlowTrace& trace, const Analysis& an) {
    using nlohmann::ordered_json;
    std::ostringstream os;
    ordered_json summary;
    summary["section"] = "summary";
    summary["scenario"] = config.scenario;
    summary["status"] = to_string(trace.status);
    summary["records"] = trace.records.size();
    summary["events"] = trace.events.size();
    summary["accepted_steps"] = trace.accepted_steps;
    summary["rejected_steps"] = trace.rejected_steps;
    summary["thinned"] = trace.thinned;
    if (!trace.records.empty()) {
        const TraceRecord& last = trace.records.back();
        summary["t_end"] = last.t;
        summary["z_end"] = last.z;
        summary["a_end"] = last.a;
        summary["b_end"] = last.b;
        summary["energy_gap_end"] = last.energy_gap;
    }
    summary["final_winding_index"] = an.final_winding;
    summary["min_inj_radius"] = an.min_inj_radius;
    summary["min_speed"] = an.min_speed;
    summary["final_speed"] = an.final_speed;
    summary["min_tracking_slack"] = an.min_tracking_slack;
    summary["metric_length_constant"] = an.metric_length_constant;
    summary["metric_length_bound"] = config.flow.eta;
    os << summary.dump() << "\n";

    for (const OffsetLimit& lim : an.limits.offsets) {
        ordered_json j;
        j["section"] = "limit";
        j["offset"] = lim.offset;
        j["limit_a"] = lim.limit_point.a;
        j["limit_b"] = lim.limit_point.b;
        j["verdict"] = lim.verdict;
        j["converged"] = lim.converged;
        j["final_distance"] = lim.final_distance;
        j["monotone_tail"] = lim.monotone_tail;
        j["fitted_rate"] = lim.fitted_rate;
        ordered_json samples = ordered_json::array();
        for (const LimitSample& s : lim.samples) {
            samples.push_back({{"j", s.j}, {"t", s.t}, {"a", s.pulled_back.a}, {"b", s.pulled_back.b},
                               {"distance", s.distance}, {"energy_gap", s.energy_gap}});
        }
        j["samples"] = samples;
        os << j.dump() << "\n";
    }
    ordered_json limits;
    limits["section"] = "limits";
    limits["applicable"] = an.limits.applicable;
    limits["message"] = an.limits.message;
    limits["min_limit_separation"] = number_or_null(an.limits.min_limit_separation);
    limits["limits_distinct"] = an.limits.limits_distinct;
    os << limits.dump() << "\n";

    const LojasiewiczFit& f = an.lojasiewicz;
    ordered_json loj;
    loj["section"] = "lojasiewicz";
    loj["applicable"] = f.applicable;
    loj["verdict"] = f.verdict;
    loj["alpha_hat"] = f.alpha_hat;
    loj["slope"] = f.slope;
    loj["intercept"] = f.intercept;
    loj["residual_rms"] = f.residual_rms;
    loj["max_residual"] = f.max_residual;
    loj["points"] = f.points;
    loj["energy_decades"] = f.energy_decades;
    os << loj.dump() << "\n";

    for (const InvariantCheck& c : an.checks) {
        ordered_json j;
        j["section"] = "invariant";
        j["name"] = c.name;
        j["passed"] = c.passed;
        j["worst"] = number_or_null(c.worst);
        j["detail"] = c.detail;
        os << j.dump() << "\n";
    }
    return os.str();
}

std::string manifest_text(const ScenarioConfig& config, const RunArtifacts& run) {
    std::ostringstream os;
    os << "tmhf run manifest\n";
    os << "version = " << kVersion << "\n";
    os << "status = " << to_string(run.trace.status) << "\n";
    os << "exit_code = " << run.exit_code << "\n";
    os << "quad_diff_norm_constant = " << format_double(kQuadDiffNormConstant) << "\n";
    os << "l2_metric_factor = " << format_double(kL2MetricFactor) << "\n";
    os << "metric_length_constant_bound = " << format_double(config.flow.eta) << "\n";
    os << "metric_length_constant_measured = "
       << format_double(run.analysis.metric_length_constant) << "\n";
    os << "records = " << run.trace.records.size() << "\n";
    os << "accepted_steps = " << run.trace.accepted_steps << "\n";
    os << "rejected_steps = " << run.trace.rejected_steps << "\n";
    if (!run.trace.message.empty()) os << "message = " << run.trace.message << "\n";
    if (!run.error.empty()) os << "error = " << run.error << "\n";
    if (run.last_good) {
        os << "last_good_state = t " << format_double(run.last_good->t) << ", z "
           << format_double(run.last_good->z) << ", a " << format_double(run.last_good->a) << ", b "
           << format_double(run.last_good->b) << "\n";
    }
    for (const InvariantCheck& c : run.analysis.checks) {
        if (!c.passed) os << "violation = " << c.name << ": " << c.detail << "\n";
    }
    os << "\n[config]\n" << serialize_config(config);
    return os.str();
}

}  // namespace

bool Analysis::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const InvariantCheck& c) { return c.passed; });
}

Analysis analyze(const ScenarioConfig& config, const FlowTrace& trace) {
    Analysis an;
    const auto& rec = trace.records;
    an.limits = limit_analysis(config.curve, trace, config.flow.level_offsets,
                               config.analysis.limit_tolerance);
    an.lojasiewicz = lojasiewicz_fit(trace, config.analysis.tail_fraction, config.flow.abs_tol,
                                     config.flow.velocity_threshold);
    an.metric_length_constant = metric_length_constant(trace);

    an.min_inj_radius = std::numeric_limits<double>::infinity();
    an.min_speed = std::numeric_limits<double>::infinity();
    an.min_tracking_slack = std::numeric_limits<double>::infinity();
    double worst_rise = 0.0;
    for (std::size_t k = 0; k < rec.size(); ++k) {
        an.min_inj_radius = std::min(an.min_inj_radius, rec[k].inj_radius);
        an.min_speed = std::min(an.min_speed, rec[k].speed);
        an.min_tracking_slack = std::min(an.min_tracking_slack, tracking_residual(rec[k]).slack());
        if (k > 0) worst_rise = std::max(worst_rise, rec[k].energy_gap - rec[k - 1].energy_gap);
    }
    if (!rec.empty()) {
        an.final_speed = rec.back().speed;
        an.final_winding = rec.back().winding_index;
    }

    auto add = [&](std::string name, bool passed, double worst, std::string detail) {
        an.checks.push_back({std::move(name), passed, worst, std::move(detail)});
    };
    add("integration_completed", trace.status == TraceStatus::completed, 0.0,
        to_string(trace.status) + (trace.message.empty() ? "" : ": " + trace.message));
    add("tracking_bound", rec.empty() || an.min_tracking_slack >= -kTrackingSlack,
        an.min_tracking_slack, "min of 2 sqrt2 (E-1)^1/2 - d_WP(g, G_z) must be >= -1e-8");
    const double rise_tol = 10.0 * config.flow.abs_tol;
    add("energy_monotone", worst_rise <= rise_tol, worst_rise,
        "largest energy increase between records must be <= 10 abs_tol");
    // The bound is attained when dz/dt = 0, so allow rounding above eta.
    add("metric_length_constant", an.metric_length_constant <= config.flow.eta * (1.0 + kLengthSlack),
        an.metric_length_constant, "measured C(eta) must be <= eta");
    if (winding_profile(config)) {
        add("no_stationary_points", rec.empty() || an.min_speed > 0.0, an.min_speed,
            "minimum velocity norm must be positive");
    }
    return an;
}

fs::path output_root() {
    const char* env = std::getenv(kOutputRootEnv);
    return env && *env ? fs::path(env) : fs::path("runs");
}

fs::path resolve_run_dir(const ScenarioConfig& config) {
    const fs::path dir(config.output.dir);
    return dir.is_absolute() ? dir : output_root() / dir;
}

RunArtifacts run_scenario(const ScenarioConfig& config) {
    RunArtifacts run;
    run.run_dir = resolve_run_dir(config);
    run.trace_file = run.run_dir / "trace.csv";
    run.events_file = run.run_dir / "events.jsonl";
    run.report_file = run.run_dir / "report.jsonl";
    run.config_file = run.run_dir / "config.txt";
    run.manifest_file = run.run_dir / "manifest.txt";
    run.trace.eta = config.flow.eta;

    try {
        fs::create_directories(run.run_dir);
    } catch (const std::exception& e) {
        run.error = std::string("cannot create run directory: ") + e.what();
        run.exit_code = 2;
        return run;
    }

    try {
        run.trace = integrate(config.profile, config.curve, config.flow, config.initial_state());
    } catch (const StepUnderflow& e) {
        run.trace.status = TraceStatus::step_underflow;
        run.error = e.what();
        run.last_good = e.last_good();
    } catch (const std::exception& e) {
        run.trace.status = TraceStatus::non_finite;
        run.error = e.what();
    }

    try {
        run.analysis = analyze(config, run.trace);
        run.exit_code = !run.error.empty() ? 2 : (run.analysis.ok() ? 0 : 1);
        write_text(run.config_file, serialize_config(config));
        write_trace_csv(run.trace_file, run.trace.records);
        write_events_jsonl(run.events_file, run.trace.events);
        write_text(run.report_file, report_jsonl(config, run.trace, run.analysis));
        if (config.output.plots) {
            PlotResult plots = emit_plots(run.run_dir, run.trace.records, run.analysis.lojasiewicz);
            run.plot_files = std::move(plots.files);
            run.warnings = std::move(plots.warnings);
        }
    } catch (const std::exception& e) {
        if (!run.error.empty()) run.error += "; ";
        run.error += e.what();
        run.exit_code = 2;
    }
    try {
        write_text(run.manifest_file, manifest_text(config, run));
    } catch (const std::exception& e) {
        run.error += std::string("; cannot write manifest: ") + e.what();
        run.exit_code = 2;
    }
    return run;
}

std::vector<RunArtifacts> run_sweep(const std::vector<ScenarioConfig>& configs, unsigned threads) {
    std::vector<RunArtifacts> out(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) out[i] = run_scenario(configs[i]);
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return out;
}

LoadedRun load_run(const fs::path& dir) {
    LoadedRun run;
    run.config = parse_config(read_text(dir / "config.txt"));
    run.trace.eta = run.config.flow.eta;
    run.trace.records = read_trace_csv(dir / "trace.csv", run.config.flow.eta);
    // The stored state round-trips exactly; energy - 1 from the CSV column does not.
    const FlowSystem sys(run.config.profile, run.config.curve, run.config.flow.eta);
    for (TraceRecord& r : run.trace.records) {
        r.energy_gap = sys.energy_excess(r.state());
        r.speed = sys.speed(r.state());
    }
    run.trace.events = read_events_jsonl(dir / "events.jsonl", run.trace.records);
    const fs::path manifest = dir / "manifest.txt";
    if (fs::exists(manifest)) {
        std::istringstream in(read_text(manifest));
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("status = ", 0) != 0) continue;
            const std::string s = line.substr(9);
            if (s == "b_out_of_range") run.trace.status = TraceStatus::b_out_of_range;
            if (s == "non_finite") run.trace.status = TraceStatus::non_finite;
            if (s == "step_underflow") run.trace.status = TraceStatus::step_underflow;
            break;
        }
    }
    return run;
}

Analysis report_run(const fs::path& dir, std::ostream& out) {
    const LoadedRun run = load_run(dir);
    Analysis an = analyze(run.config, run.trace);
    write_text(dir / "report.jsonl", report_jsonl(run.config, run.trace, an));
    out << summarize(run.config, run.trace, an);
    return an;
}

std::vector<fs::path> plot_run(const fs::path& dir, std::ostream& warn) {
    const LoadedRun run = load_run(dir);
    const LojasiewiczFit fit =
        lojasiewicz_fit(run.trace, run.config.analysis.tail_fraction, run.config.flow.abs_tol,
                        run.config.flow.velocity_threshold);
    PlotResult plots = emit_plots(dir, run.trace.records, fit);
    for (const std::string& w : plots.warnings) warn << "warning: " << w << "\n";
    return plots.files;
}

std::string summarize(const ScenarioConfig& config, const FlowTrace& trace, const Analysis& an) {
    std::ostringstream os;
    os << "scenario " << config.scenario << ": " << to_string(trace.status) << ", "
       << trace.records.size() << " records, " << trace.events.size() << " events\n";
    if (!trace.records.empty()) {
        const TraceRecord& r = trace.records.back();
        os << "  final t = " << r.t << ", z = " << r.z << ", (a, b) = (" << r.a << ", " << r.b
           << "), E - 1 = " << r.energy_gap << ", winding index " << r.winding_index << "\n";
    }
    os << "  min injectivity radius " << an.min_inj_radius << ", min speed " << an.min_speed
       << ", final speed " << an.final_speed << "\n";
    os << "  metric length constant " << an.metric_length_constant << " (bound " << config.flow.eta
       << ")\n";
    if (an.limits.applicable) {
        for (const OffsetLimit& lim : an.limits.offsets) {
            os << "  offset " << lim.offset << ": " << lim.verdict << ", final distance "
               << lim.final_distance << " over " << lim.samples.size() << " crossings\n";
        }
        os << "  limit separation " << an.limits.min_limit_separation << "\n";
    } else {
        os << "  limits: " << an.limits.message << "\n";
    }
    os << "  lojasiewicz: " << an.lojasiewicz.verdict;
    if (an.lojasiewicz.applicable) {
        os << ", alpha_hat " << an.lojasiewicz.alpha_hat << ", residual rms "
           << an.lojasiewicz.residual_rms << " over " << an.lojasiewicz.points << " points";
    }
    os << "\n";
    for (const InvariantCheck& c : an.checks) {
        os << "  [" << (c.passed ? "ok" : "VIOLATED") << "] " << c.name << " (" << c.worst << ")\n";
    }
    return os.str();
}

}  // namespace tmhf
