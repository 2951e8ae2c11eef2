#include <benchmark/benchmark.h>

#include "fmcw/spectra.hpp"
#include "fmcw/synth.hpp"

namespace {

using namespace fmcw;

// 32-sweep CPI of the point-target scene (N = 6000 samples per sweep).
const CpiScenario& cpi_scene() {
    static const CpiScenario sc = [] {
        auto cfg = point_target_scenario(20.0, 3);
        cfg.n_sweeps = 32;
        return build_cpi_scenario(cfg);
    }();
    return sc;
}

void BM_RangeDoppler(benchmark::State& state) {
    const auto& sc = cpi_scene();
    for (auto _ : state)
        benchmark::DoNotOptimize(range_doppler(sc.contaminated, Window::Hann, Window::Hann));
}
BENCHMARK(BM_RangeDoppler)->Unit(benchmark::kMillisecond);

void BM_MitigateCpi(benchmark::State& state) {
    const auto& sc = cpi_scene();
    CpiConfig cfg;
    cfg.mitigation.method = Method::MP;
    cfg.mitigation.mp.order = 4;
    cfg.workers = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mitigate_cpi(sc.contaminated, sc.truth_gap, cfg));
}
BENCHMARK(BM_MitigateCpi)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
