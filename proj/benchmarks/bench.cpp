#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "tmhf/config.hpp"
#include "tmhf/flow.hpp"
#include "tmhf/moduli.hpp"

using namespace tmhf;

namespace {

std::vector<TeichPoint> random_points(std::size_t n, double b_lo, double b_hi) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(-20, 20), b(b_lo, b_hi);
    std::vector<TeichPoint> pts;
    for (std::size_t i = 0; i < n; ++i) pts.push_back({a(rng), b(rng)});
    return pts;
}

void BM_identity_energy(benchmark::State& state) {
    const auto pts = random_points(1024, 0.1, 10);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(identity_energy(pts[i & 1023], pts[(i + 1) & 1023]));
        ++i;
    }
}
BENCHMARK(BM_identity_energy);

void BM_reduce_to_fundamental_domain(benchmark::State& state) {
    const auto pts = random_points(1024, 1e-3, 10);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reduce_to_fundamental_domain(pts[i & 1023]));
        ++i;
    }
}
BENCHMARK(BM_reduce_to_fundamental_domain);

void BM_injectivity_radius(benchmark::State& state) {
    const auto pts = random_points(1024, 1e-2, 10);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(injectivity_radius(pts[i & 1023]));
        ++i;
    }
}
BENCHMARK(BM_injectivity_radius);

void BM_integrate(benchmark::State& state) {
    ScenarioConfig c = preset("winding-dehn");
    c.flow.t_max = static_cast<double>(state.range(0));
    for (auto _ : state) {
        const FlowTrace tr = integrate(c.profile, c.curve, c.flow, c.initial_state());
        benchmark::DoNotOptimize(tr.records.size());
    }
}
BENCHMARK(BM_integrate)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
