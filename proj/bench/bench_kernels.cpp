// Serial reference kernels against their OpenMP drivers.
// Worker counts above the machine's core count still run; they only measure overhead there.

#include <benchmark/benchmark.h>

#include "dperc/animals.hpp"
#include "dperc/commands.hpp"
#include "dperc/disjoint_set.hpp"
#include "dperc/observables.hpp"
#include "dperc/rng.hpp"
#include "dperc/sampler.hpp"

using namespace dperc;

namespace {

SweepConfig sweep_config(int L) {
    SweepConfig cfg;
    cfg.spec = {3, 2, L, Boundary::free};
    cfg.p = 0.1;
    cfg.realizations = 200;
    cfg.seed = 1;
    return cfg;
}

ClusterConfig cluster_config() {
    ClusterConfig cfg;
    cfg.spec = {3, 2, 10, Boundary::free};
    cfg.p = 0.1;
    cfg.sigma = 0.45;
    cfg.samples = 20'000;
    cfg.seed = 1;
    return cfg;
}

void BM_SweepSerial(benchmark::State& state) {
    const SweepConfig cfg = sweep_config(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.realizations));
}
BENCHMARK(BM_SweepSerial)->Arg(6)->Arg(10)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_SweepParallel(benchmark::State& state) {
    const SweepConfig cfg = sweep_config(static_cast<int>(state.range(0)));
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(sweep(cfg, workers));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.realizations));
}
BENCHMARK(BM_SweepParallel)
    ->ArgsProduct({{6, 10}, {1, 2, 4}})
    ->ArgNames({"L", "workers"})
    ->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_ClusterSerial(benchmark::State& state) {
    const ClusterConfig cfg = cluster_config();
    for (auto _ : state) benchmark::DoNotOptimize(sample_distribution_serial(cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.samples));
}
BENCHMARK(BM_ClusterSerial)->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_ClusterParallel(benchmark::State& state) {
    const ClusterConfig cfg = cluster_config();
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_distribution(cfg, workers));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.samples));
}
BENCHMARK(BM_ClusterParallel)->Arg(1)->Arg(2)->Arg(4)->ArgName("workers")->UseRealTime()->Unit(benchmark::kMillisecond);

void BM_Animals(benchmark::State& state) {
    const int workers = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_animals(3, 2, 6, workers));
}
BENCHMARK(BM_Animals)->Arg(1)->Arg(2)->Arg(4)->ArgName("workers")->UseRealTime()->Unit(benchmark::kMillisecond);

// Random unions over a cubic box, the inner loop of every sweep.
void BM_UnionFind(benchmark::State& state) {
    const SweepSetup setup({3, 2, static_cast<int>(state.range(0)), Boundary::free}, 1);
    const auto& edges = setup.table.edges;
    std::vector<std::uint32_t> order(edges.size());
    CounterStream rng(stream_key(9, 0));
    for (std::uint32_t i = 0; i < order.size(); ++i) {
        const auto j = static_cast<std::uint32_t>(rng.below(i + 1));
        order[i] = order[j];
        order[j] = i;
    }
    DisjointSetForest forest;
    for (auto _ : state) {
        forest.reset(setup.geometry.vertex_masks);
        FaceMask acc = 0;
        for (auto e : order) acc |= forest.unite(edges[e].u, edges[e].v);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(order.size()));
}
BENCHMARK(BM_UnionFind)->Arg(10)->Arg(20)->ArgName("L");

}  // namespace

BENCHMARK_MAIN();
