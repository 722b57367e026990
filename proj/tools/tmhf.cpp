// tmhf: simulate, validate, sweep, report and plot.

#include <glob.h>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "tmhf/config.hpp"
#include "tmhf/errors.hpp"
#include "tmhf/io.hpp"
#include "tmhf/scenario.hpp"
#include "tmhf/validate.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<std::string> expand_glob(const std::string& pattern) {
    glob_t g{};
    std::vector<std::string> out;
    if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
        for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    }
    globfree(&g);
    std::sort(out.begin(), out.end());
    return out;
}

tmhf::ScenarioConfig load_config(const std::string& path) {
    try {
        return tmhf::parse_config(tmhf::read_text(path));
    } catch (const tmhf::ConfigError& e) {
        throw tmhf::ConfigError(path + ": " + e.what(), e.line(), e.key());
    }
}

void print_run(const tmhf::ScenarioConfig& config, const tmhf::RunArtifacts& run) {
    std::cout << tmhf::summarize(config, run.trace, run.analysis);
    for (const auto& w : run.warnings) std::cerr << "warning: " << w << "\n";
    if (!run.error.empty()) std::cerr << "error: " << run.error << "\n";
    if (run.last_good) {
        std::cerr << "last good state: t = " << run.last_good->t << ", z = " << run.last_good->z
                  << ", a = " << run.last_good->a << ", b = " << run.last_good->b << "\n";
    }
    std::cout << "  run directory: " << run.run_dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Teichmüller harmonic map flow from the torus"};
    app.require_subcommand(1);

    std::string config_path;
    bool no_plots = false;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario from a config file");
    simulate->add_option("config", config_path, "Config file (key = value)")->required();
    simulate->add_flag("--no-plots", no_plots, "Skip SVG output");

    std::uint64_t seed = 1;
    double kappa_scale = 1.0;
    auto* validate = app.add_subcommand("validate", "Run the closed-form identity suites");
    validate->add_option("--seed", seed, "Random seed");
    validate->add_option("--kappa-scale", kappa_scale)->group("");

    std::vector<std::string> patterns;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep = app.add_subcommand("sweep", "Run every config matching the glob patterns");
    sweep->add_option("patterns", patterns, "Config glob(s), e.g. 'configs/*.cfg'")->required();
    sweep->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    std::string run_dir;
    auto* report = app.add_subcommand("report", "Recompute the analysis of a run directory");
    report->add_option("run-dir", run_dir)->required()->check(CLI::ExistingDirectory);
    auto* plot = app.add_subcommand("plot", "Re-emit the SVG plots of a run directory");
    plot->add_option("run-dir", run_dir)->required()->check(CLI::ExistingDirectory);

    std::string preset_name;
    auto* preset = app.add_subcommand("preset", "Print the full config of a named preset");
    preset->add_option("name", preset_name)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            tmhf::ScenarioConfig config = load_config(config_path);
            if (no_plots) config.output.plots = false;
            const tmhf::RunArtifacts run = tmhf::run_scenario(config);
            print_run(config, run);
            return run.exit_code;
        }
        if (*validate) {
            const tmhf::ValidationReport r = tmhf::validate({seed, kappa_scale});
            tmhf::print_report(std::cout, r);
            return r.passed() ? 0 : 1;
        }
        if (*sweep) {
            std::vector<std::string> files;
            for (const auto& p : patterns) {
                const auto matched = expand_glob(p);
                files.insert(files.end(), matched.begin(), matched.end());
            }
            if (files.empty()) {
                std::cerr << "error: no config files match\n";
                return 2;
            }
            std::vector<tmhf::ScenarioConfig> configs;
            for (const auto& f : files) configs.push_back(load_config(f));
            const auto runs = tmhf::run_sweep(configs, threads);
            int worst = 0;
            for (std::size_t i = 0; i < runs.size(); ++i) {
                std::cout << files[i] << "\n";
                print_run(configs[i], runs[i]);
                worst = std::max(worst, runs[i].exit_code);
            }
            return worst;
        }
        if (*report) {
            const tmhf::Analysis an = tmhf::report_run(run_dir, std::cout);
            return an.ok() ? 0 : 1;
        }
        if (*plot) {
            for (const auto& f : tmhf::plot_run(run_dir, std::cerr)) std::cout << f.string() << "\n";
            return 0;
        }
        if (*preset) {
            std::cout << tmhf::serialize_config(tmhf::preset(preset_name));
            return 0;
        }
    } catch (const tmhf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
