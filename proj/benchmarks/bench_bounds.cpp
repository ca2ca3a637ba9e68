#include <benchmark/benchmark.h>

#include "aoinc/analyzer.hpp"
#include "aoinc/markov.hpp"
#include "aoinc/stieltjes.hpp"

using namespace aoinc;

static void BM_StieltjesConv(benchmark::State& state) {
    double x = 3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(stieltjes_exp_conv(2.0, 1.3, 0.7, x));
        x = x < 20.0 ? x + 1e-3 : 3.0;
    }
}
BENCHMARK(BM_StieltjesConv);

static void BM_MarkovEnvelopeTwoState(benchmark::State& state) {
    const auto chain = onoff_transition({0.9, 2.0 / 0.09, 2.0});
    double theta = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(markov_service_envelope(chain, theta));
        theta = theta < 5.0 ? theta * 1.01 : 0.01;
    }
}
BENCHMARK(BM_MarkovEnvelopeTwoState);

static void BM_SpectralRadiusPowerIteration(benchmark::State& state) {
    MarkovChannelSpec chain;
    chain.n = 4;
    chain.transition = {0.7, 0.1, 0.1, 0.1, 0.2, 0.6, 0.1, 0.1,
                        0.1, 0.2, 0.6, 0.1, 0.1, 0.1, 0.2, 0.6};
    chain.rates = {0.0, 1.0, 2.0, 4.0};
    chain.slot = 1.0;
    for (auto _ : state) benchmark::DoNotOptimize(markov_spectral_radius_power(chain, 0.3));
}
BENCHMARK(BM_SpectralRadiusPowerIteration);

static void BM_OptimizedAgeBound(benchmark::State& state) {
    SubsystemAnalyzer an(ArrivalModel{PoissonPackets{1.0, 1.0}},
                         ServiceModel{PoissonService{2.0}, 1.0});
    double x = 5.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(an.age_eval(x));
        x = x < 30.0 ? x + 0.5 : 5.0;
    }
}
BENCHMARK(BM_OptimizedAgeBound);

static void BM_QuantileInversion(benchmark::State& state) {
    SubsystemAnalyzer an(ArrivalModel{PoissonPackets{1.0, 1.0}},
                         ServiceModel{PoissonService{2.0}, 1.0});
    for (auto _ : state) benchmark::DoNotOptimize(invert_quantile(an.age_curve(), 1e-6));
}
BENCHMARK(BM_QuantileInversion);

BENCHMARK_MAIN();
