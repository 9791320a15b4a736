// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "bellbin/detection.hpp"
#include "bellbin/pair_sources.hpp"
#include "bellbin/teleportation.hpp"

using namespace bellbin;

namespace {

const EventDistribution& phi_events() {
    static const auto ev = events_from_outcomes(bell_table(0.0)[0]);
    return ev;
}

const DetectorModel kNoisy{{0.6, 0.8}, 1e-3, AnalyzerMode::DeadTimeLimited};

void BM_SampleSerial(benchmark::State& state) {
    const auto shots = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_counts_serial(phi_events(), kNoisy, shots, 1, coincidence_bin, kOutcomeCount));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleParallel(benchmark::State& state) {
    const auto shots = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_counts(phi_events(), kNoisy, shots, 1, coincidence_bin, kOutcomeCount));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

std::vector<double> delays() {
    std::vector<double> d;
    for (int i = -20; i <= 20; ++i) d.push_back(0.2 * i);
    return d;
}

void BM_AntidipSerial(benchmark::State& state) {
    const auto d = delays();
    for (auto _ : state) benchmark::DoNotOptimize(antidip_scan_serial(d, {}, DelayModel{}));
}

void BM_AntidipParallel(benchmark::State& state) {
    const auto d = delays();
    for (auto _ : state) benchmark::DoNotOptimize(antidip_scan(d, {}, DelayModel{}));
}

void BM_FringeSerial(benchmark::State& state) {
    const auto grid = phase_grid(64);
    for (auto _ : state) benchmark::DoNotOptimize(fringe_scan_serial(ScanAxis::Alpha, grid, {0, 0.3, 0.2, 0.6}));
}

void BM_FringeParallel(benchmark::State& state) {
    const auto grid = phase_grid(64);
    for (auto _ : state) benchmark::DoNotOptimize(fringe_scan(ScanAxis::Alpha, grid, {0, 0.3, 0.2, 0.6}));
}

}  // namespace

BENCHMARK(BM_SampleSerial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleParallel)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_AntidipSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AntidipParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FringeSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FringeParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
