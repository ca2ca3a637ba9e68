#include <benchmark/benchmark.h>

#include "aoinc/markov.hpp"
#include "aoinc/sim.hpp"

using namespace aoinc;

namespace {

SimScenario scenario(std::vector<ServiceModel> svcs, double w, std::uint64_t n) {
    SimScenario sc;
    sc.system.external_arrivals = ArrivalModel{PoissonPackets{1.0, w}};
    sc.system.splitting.policy = SplitPolicy::RandomWeighted;
    sc.system.splitting.weights.assign(svcs.size(), 1.0 / static_cast<double>(svcs.size()));
    sc.system.services = std::move(svcs);
    sc.n_packets = n;
    sc.seed = 7;
    sc.quantile_eps = {1e-2};
    return sc;
}

}  // namespace

static void BM_SimulateMM1(benchmark::State& state) {
    const auto sc = scenario({ServiceModel{PoissonService{2.0}, 1.0}}, 1.0,
                             static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate(sc));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateMM1)->Arg(100000)->Arg(1000000);

static void BM_SimulateParallelOnOff(benchmark::State& state) {
    const auto svc = ServiceModel{MarkovModulated{onoff_transition({0.9, 2.0 / 0.09, 1.0 / 0.9}), false}, 1.0};
    const auto sc = scenario({svc, svc}, 1.2, static_cast<std::uint64_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate(sc));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateParallelOnOff)->Arg(100000)->Arg(1000000);

static void BM_AgeStatistics(benchmark::State& state) {
    const auto sc = scenario({ServiceModel{PoissonService{2.0}, 1.0}}, 1.0,
                             static_cast<std::uint64_t>(state.range(0)));
    std::vector<PacketRecord> recs;
    simulate_with_records(sc, &recs);
    double horizon = 0.0;
    for (const auto& r : recs) horizon = std::max(horizon, r.t_departure);
    for (auto _ : state)
        benchmark::DoNotOptimize(age_statistics(recs, horizon, {1e-3}, 0.0, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AgeStatistics)->Arg(1000000);

BENCHMARK_MAIN();
