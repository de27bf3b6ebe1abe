#include "vibrotherm/lineshape_kernels.hpp"
#include "vibrotherm/spectra.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace vibrotherm;

namespace {

std::vector<LineTerm> melppp_lines(double T)
{
    const auto sys = make_system(2720.0, 34.0,
                                 {{48 * constants::meV_per_cm1, 0.7, 0.0}, {160 * constants::meV_per_cm1, 0.5, 0.0},
                                  {1320 * constants::meV_per_cm1, 0.3, 0.0}, {1568 * constants::meV_per_cm1, 0.23, 0.0},
                                  {1604 * constants::meV_per_cm1, 0.082, 0.0}},
                                 200 * constants::meV_per_cm1);
    return exact_lines(sys, Temperature(T), SpectrumKind::emission);
}

void BM_superpose_serial(benchmark::State& st)
{
    const auto lines = melppp_lines(double(st.range(0)));
    const auto grid = uniform_grid(1920.0, 3520.0, 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::superpose_serial(lines, grid, LineShape::gaussian));
    st.counters["terms"] = double(lines.size());
}

void BM_superpose_parallel(benchmark::State& st)
{
    const auto lines = melppp_lines(double(st.range(0)));
    const auto grid = uniform_grid(1920.0, 3520.0, 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(kernels::superpose_parallel(lines, grid, LineShape::gaussian));
    st.counters["terms"] = double(lines.size());
    // the windowed sum accounts for part of the gap even on one thread
    st.counters["threads"] = double(omp_get_max_threads());
}

} // namespace

BENCHMARK(BM_superpose_serial)->Arg(6)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_superpose_parallel)->Arg(6)->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
