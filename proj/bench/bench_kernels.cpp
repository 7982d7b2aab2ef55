// SPDX-License-Identifier: Apache-2.0
// Serial reference vs OpenMP kernels. Arg(0) is serial, Arg(1) parallel.
#include <benchmark/benchmark.h>

#include "cloudcap/analysis.hpp"
#include "cloudcap/policies.hpp"
#include "cloudcap/sol.hpp"

using namespace cloudcap;

namespace {

Execution exec_of(const benchmark::State& st)
{
    return st.range(0) ? Execution::parallel : Execution::serial;
}

const Scenario& scenario()
{
    static const Scenario sc = builtin_preset("time_varying");
    return sc;
}

const AggregateSol& aggregate()
{
    static const AggregateSol agg = [] {
        std::vector<SolMoments> parts;
        for (const auto& c : scenario().classes)
            parts.push_back(sol_moments(c, 0));
        return AggregateSol(parts);
    }();
    return agg;
}

void BM_pooled_schedule(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(pooled_schedule(scenario(), {}, exec_of(st)));
}

void BM_benchmark_schedule(benchmark::State& st)
{
    for (auto _ : st)
        benchmark::DoNotOptimize(benchmark_schedule(scenario(), {}, exec_of(st)));
}

void BM_diffusion_ensemble(benchmark::State& st)
{
    const auto grid = minute_grid(1441);
    for (auto _ : st)
        benchmark::DoNotOptimize(diffusion_ensemble(aggregate(), 500, grid, 1, exec_of(st)));
}

void BM_rank_paths(benchmark::State& st)
{
    const auto paths = diffusion_ensemble(aggregate(), 200, minute_grid(1441), 1);
    for (auto _ : st)
        benchmark::DoNotOptimize(rank_paths(paths, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_pooled_schedule)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_benchmark_schedule)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_diffusion_ensemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_rank_paths)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
