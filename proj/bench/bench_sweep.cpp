// Serial 2N particle-hole reference against the OpenMP reduced-frame sweep.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <vector>

#include "negham/gaussian.hpp"

using namespace negham;

namespace {

std::vector<double> times_for(int l)
{
    // spans the light cone of the l = d geometry
    std::vector<double> t;
    for (int i = 0; i < 8; ++i) t.push_back(0.25 * l * i);
    return t;
}

void BM_sweep_serial(benchmark::State& st)
{
    const int l = static_cast<int>(st.range(0));
    const TripartiteGeometry g(l, l, l);
    const auto times = times_for(l);
    gauss::SweepOptions opt;
    for (auto _ : st) benchmark::DoNotOptimize(gauss::sweep_serial(g, times, opt));
    st.counters["time_points"] = double(times.size());
}

void BM_sweep_parallel(benchmark::State& st)
{
    const int l = static_cast<int>(st.range(0));
    const int threads = static_cast<int>(st.range(1));
    const TripartiteGeometry g(l, l, l);
    const auto times = times_for(l);
    gauss::SweepOptions opt;
    omp_set_num_threads(threads);
    for (auto _ : st) benchmark::DoNotOptimize(gauss::sweep_parallel(g, times, opt));
    st.counters["threads"] = threads;
    st.counters["time_points"] = double(times.size());
}

}  // namespace

BENCHMARK(BM_sweep_serial)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sweep_parallel)
    ->ArgsProduct({{20, 50, 100}, {1, 2, 4, 8}})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

BENCHMARK_MAIN();
