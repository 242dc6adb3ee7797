#include <benchmark/benchmark.h>

#include "bench_support.hpp"
#include "terrastep/fft.hpp"
#include "terrastep/rng.hpp"
#include "terrastep/stats.hpp"

using namespace terrastep;

static void FftMagnitude(benchmark::State& state) {
    Rng rng(1);
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    for (auto& v : x) v = rng.next_gaussian();
    for (auto _ : state) {
        auto mag = fft::magnitude_spectrum(x);
        benchmark::DoNotOptimize(mag);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(FftMagnitude)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

static void SeriesStatistics(benchmark::State& state) {
    Rng rng(2);
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    for (auto& v : x) v = rng.next_gaussian();
    for (auto _ : state) {
        double acc = stats::variance(x) + stats::skewness(x) + stats::kurtosis(x) +
                     stats::zero_crossing_rate(x);
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(SeriesStatistics)->Arg(64)->Arg(1024);

static void ExtractFeaturesPerStep(benchmark::State& state) {
    const auto& run = bench::fixture_run();
    const auto& segments = bench::fixture_segments();
    const auto bands = SpectralBandSpec::log_bands(run.fast.rate_hz);
    std::size_t i = 0;
    for (auto _ : state) {
        auto fv = extract_features(run, segments[i % segments.size()], bands);
        benchmark::DoNotOptimize(fv);
        ++i;
    }
}
BENCHMARK(ExtractFeaturesPerStep);

static void SegmentRun(benchmark::State& state) {
    const auto& run = bench::fixture_run();
    for (auto _ : state) {
        auto segments = segment(run, {});
        benchmark::DoNotOptimize(segments);
    }
}
BENCHMARK(SegmentRun);
