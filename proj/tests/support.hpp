#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "tmhf/config.hpp"

namespace support {

inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("tmhf-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// A random config that passes validation; every field is exercised.
inline tmhf::ScenarioConfig random_config(std::mt19937_64& rng) {
    using namespace tmhf;
    const auto names = preset_names();
    ScenarioConfig c = preset(names[rng() % names.size()]);
    c.seed = rng() % 1000000;
    switch (rng() % 3) {
        case 0:
            c.curve = ModuliCurve::dehn_twist(uniform(rng, 0.2, 3.0), uniform(rng, -1.0, 1.0));
            break;
        case 1:
            c.curve = ModuliCurve::closed_loop({uniform(rng, -1, 1), uniform(rng, 1.0, 3.0)},
                                               uniform(rng, 0.0, 0.9));
            break;
        default: {
            std::vector<TeichPoint> pts;
            const int m = 3 + static_cast<int>(rng() % 4);
            for (int i = 0; i < m; ++i) pts.emplace_back(uniform(rng, -1, 1), uniform(rng, 0.5, 2.0));
            pts.push_back(pts.front());
            c.curve = ModuliCurve::spline(pts, MappingClass::identity());
        }
    }
    c.profile.kind = static_cast<ProfileKind>(rng() % 3);
    c.profile.width = uniform(rng, 0.01, 0.49);
    c.profile.tail = static_cast<TailKind>(rng() % 2);
    c.profile.tail_exponent = uniform(rng, 0.5, 4.0);
    c.profile.well_center = uniform(rng, -2, 2);
    c.flow.eta = uniform(rng, 0.1, 3.0);
    c.flow.t_max = uniform(rng, 1.0, 1e4);
    c.flow.rel_tol = uniform(rng, 1e-12, 1e-6);
    c.flow.abs_tol = uniform(rng, 1e-14, 1e-8);
    c.flow.min_step = uniform(rng, 1e-14, 1e-10);
    c.flow.max_step = uniform(rng, 0.1, 20.0);
    c.flow.level_offsets.clear();
    for (int i = static_cast<int>(rng() % 4); i > 0; --i) c.flow.level_offsets.push_back(uniform(rng, 0, 1));
    c.flow.velocity_threshold = uniform(rng, 0.0, 1e-3);
    c.flow.record_cap = 2 + rng() % 100000;
    c.initial.z0 = uniform(rng, -3, 3);
    if (rng() % 2) {
        c.initial.point = TeichPoint{uniform(rng, -2, 2), uniform(rng, 0.1, 5)};
    } else {
        c.initial.point.reset();
    }
    c.analysis.tail_fraction = uniform(rng, 0.05, 1.0);
    c.analysis.limit_tolerance = uniform(rng, 1e-6, 1e-1);
    c.output.dir = "sweep/run " + std::to_string(rng() % 1000);
    c.output.plots = rng() % 2 == 0;
    return c;
}

}  // namespace support
