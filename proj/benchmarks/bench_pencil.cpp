#include <benchmark/benchmark.h>

#include "fmcw/lowrank.hpp"
#include "fmcw/mitigate.hpp"
#include "fmcw/pencil.hpp"
#include "fmcw/synth.hpp"

namespace {

using namespace fmcw;

// Point-target sweep (N = 4096) with its predicted gap.
const Scenario& point_scene() {
    static const Scenario sc = build_scenario(point_target_scenario(15.0, 1));
    return sc;
}

void BM_GappedPencil(benchmark::State& state) {
    const auto& sc = point_scene();
    const auto parts = split_at_gap(sc.contaminated, sc.truth_gap);
    PencilOptions opts;
    opts.order = 3;
    opts.dense_limit = state.range(0) ? SIZE_MAX : 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            estimate_gapped(parts.front, parts.back, sc.truth_gap, sc.contaminated.size(), opts));
    state.SetLabel(state.range(0) ? "dense SVD" : "randomized SVD");
}
BENCHMARK(BM_GappedPencil)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_HankelSvd(benchmark::State& state) {
    const auto& sc = point_scene();
    const auto parts = split_at_gap(sc.contaminated, sc.truth_gap);
    const std::size_t L = default_pencil_L(parts.front.size(), parts.back.size());
    const HankelStack h({parts.front.samples, parts.back.samples}, L, 0);
    const CMatrix dense = h.dense();
    for (auto _ : state) {
        if (state.range(0))
            benchmark::DoNotOptimize(truncated_svd(dense, 8));
        else
            benchmark::DoNotOptimize(truncated_svd(h, 8));
    }
    state.SetLabel(state.range(0) ? "dense" : "randomized");
}
BENCHMARK(BM_HankelSvd)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
    const auto& sc = point_scene();
    MitigateConfig cfg;
    cfg.method = static_cast<Method>(state.range(0));
    cfg.mp.order = 3;
    cfg.burg_order = 3;
    for (auto _ : state)
        benchmark::DoNotOptimize(mitigate(sc.contaminated, sc.truth_gap, cfg));
    state.SetLabel(to_string(cfg.method));
}
BENCHMARK(BM_Reconstruct)
    ->Arg(static_cast<int>(Method::Zeroing))
    ->Arg(static_cast<int>(Method::MP))
    ->Arg(static_cast<int>(Method::Burg))
    ->Unit(benchmark::kMillisecond);

}  // namespace
