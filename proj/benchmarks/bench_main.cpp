#include <benchmark/benchmark.h>

#include "xyloops/bessel.hpp"
#include "xyloops/current.hpp"
#include "xyloops/heights.hpp"
#include "xyloops/loops.hpp"
#include "xyloops/spin_mcmc.hpp"

using namespace xyl;

static void BM_BesselScaled(benchmark::State& state) {
    const double beta = double(state.range(0)) / 4;
    for (auto _ : state)
        for (int k = 0; k < 32; ++k) benchmark::DoNotOptimize(bessel_i_scaled(k, beta));
}
BENCHMARK(BM_BesselScaled)->Arg(1)->Arg(8)->Arg(64);

static void BM_YkSample(benchmark::State& state) {
    YkDistribution y(int(state.range(0)), 1.5);
    CounterRng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(y.sample(rng));
}
BENCHMARK(BM_YkSample)->Arg(0)->Arg(4);

static void BM_PartitionFunction(benchmark::State& state) {
    PlanarGraph g = cycle_graph(4);
    SourceFunction zero(4, 0);
    const int cutoff = int(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(partition_function(g, 1.0, zero, cutoff).value);
}
BENCHMARK(BM_PartitionFunction)->Arg(6)->Arg(12)->Arg(24);

static void BM_EnumerateCurrents(benchmark::State& state) {
    PlanarGraph g = theta_graph();
    SourceFunction zero(std::size_t(g.num_vertices()), 0);
    const int cutoff = int(state.range(0));
    for (auto _ : state) {
        long count = 0;
        enumerate_currents(g, zero, cutoff, [&](const Current&) { ++count; });
        benchmark::DoNotOptimize(count);
    }
}
BENCHMARK(BM_EnumerateCurrents)->Arg(2)->Arg(4);

static void BM_LoopExpansion(benchmark::State& state) {
    PlanarGraph g = cycle_graph(4);
    Current n(std::size_t(g.num_half_edges()), int(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(verify_loopexp(g, n, {}, 1.0).rel_residual);
}
BENCHMARK(BM_LoopExpansion)->Arg(1)->Arg(2);

static void BM_SpinSweep(benchmark::State& state) {
    const int L = int(state.range(0));
    PlanarGraph box = box_lattice(L, L);
    SpinChain chain(box, 1.0, 3);
    for (auto _ : state) chain.sweep();
    state.SetItemsProcessed(state.iterations() * box.num_vertices());
}
BENCHMARK(BM_SpinSweep)->Arg(7)->Arg(15)->Arg(31);

static void BM_HeightSweep(benchmark::State& state) {
    const int L = int(state.range(0));
    PlanarGraph box = box_lattice(L, L);
    HeightChain chain(box, 1.0, 3);
    for (auto _ : state) chain.sweep();
    state.SetItemsProcessed(state.iterations() * box.num_faces());
}
BENCHMARK(BM_HeightSweep)->Arg(7)->Arg(15)->Arg(31);

static void BM_LoopAugment(benchmark::State& state) {
    PlanarGraph box = box_lattice(15, 15);
    HeightChain chain(box, 1.0, 3);
    for (int i = 0; i < 100; ++i) chain.sweep();
    LoopAugmenter aug(box, 1.0);
    CounterRng rng(5);
    for (auto _ : state) benchmark::DoNotOptimize(aug.draw(chain.heights(), rng).num_copies());
}
BENCHMARK(BM_LoopAugment);
BENCHMARK_MAIN();
