#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "aoinc/markov.hpp"
#include "aoinc/sim.hpp"
#include "oracle_utils.hpp"

using namespace aoinc;

namespace {

SystemSpec single_system(ArrivalModel arr, ServiceModel svc) {
    SystemSpec s;
    s.external_arrivals = std::move(arr);
    s.splitting.policy = SplitPolicy::RandomWeighted;
    s.splitting.weights = {1.0};
    s.services = {std::move(svc)};
    return s;
}

SystemSpec parallel_system(ArrivalModel arr, ServiceModel svc, int k, SplitPolicy policy) {
    SystemSpec s;
    s.external_arrivals = std::move(arr);
    s.splitting.policy = policy;
    if (policy == SplitPolicy::RandomWeighted)
        s.splitting.weights.assign(k, 1.0 / k);
    for (int i = 0; i < k; ++i) s.services.push_back(svc);
    return s;
}

}  // namespace

TEST_CASE("generate_arrivals") {
    Xoshiro256pp rng(1, 0);
    SUBCASE("periodic formula with offset, none at t=0") {
        const auto t = generate_arrivals(ArrivalModel{PeriodicArrivals{1.0, 2.0, 0.5}}, 3, rng);
        CHECK(t[0] == doctest::Approx(2.5));
        CHECK(t[1] == doctest::Approx(4.5));
        CHECK(t[2] == doctest::Approx(6.5));
    }
    SUBCASE("poisson mean inter-arrival law of large numbers") {
        const auto t = generate_arrivals(ArrivalModel{PoissonPackets{1.0, 1.0}}, 1000000, rng);
        const double mean = t.back() / static_cast<double>(t.size());
        CHECK(mean > 0.997);
        CHECK(mean < 1.003);
    }
}

TEST_CASE("splitting") {
    SUBCASE("random split of a Poisson stream stays exponential with scaled mean") {
        Xoshiro256pp arr_rng(7, 0), split_rng(7, 1);
        const std::uint64_t n = 200000;
        const auto t = generate_arrivals(ArrivalModel{PoissonPackets{1.0, 1.0}}, n, arr_rng);
        const auto assign = split_random_weighted(n, {0.5, 0.5}, split_rng);
        std::vector<double> gaps;
        double last = 0.0;
        for (std::uint64_t i = 0; i < n; ++i)
            if (assign[i] == 0) {
                gaps.push_back(t[i] - last);
                last = t[i];
            }
        const double d = oracle::ks_statistic(
            gaps, [](double u) { return 1.0 - std::exp(-u / 2.0); });
        CHECK(d < oracle::ks_critical_1pct(gaps.size()));
    }
    SUBCASE("round robin over Poisson yields Erlang-2 inter-arrivals") {
        Xoshiro256pp arr_rng(9, 0);
        const std::uint64_t n = 200000;
        const double w = 1.0;
        const auto t = generate_arrivals(ArrivalModel{PoissonPackets{1.0, w}}, n, arr_rng);
        std::vector<double> gaps;
        double last = 0.0;
        for (std::uint64_t i = 0; i < n; i += 2) {  // substream 0
            gaps.push_back(t[i] - last);
            last = t[i];
        }
        const double lambda = 1.0 / w;
        const double d = oracle::ks_statistic(gaps, [&](double u) {
            return 1.0 - std::exp(-lambda * u) * (1.0 + lambda * u);
        });
        CHECK(d < oracle::ks_critical_1pct(gaps.size()));
    }
    SUBCASE("weighted assignment fractions concentrate") {
        Xoshiro256pp rng(11, 1);
        const auto assign = split_random_weighted(1000000, {0.2, 0.8}, rng);
        const double frac0 =
            static_cast<double>(std::count(assign.begin(), assign.end(), 0u)) / 1e6;
        CHECK(frac0 > 0.198);
        CHECK(frac0 < 0.202);
    }
    SUBCASE("JSQ sends the packet to the empty queue") {
        SimScenario sc;
        sc.system = parallel_system(ArrivalModel{PeriodicArrivals{1.0, 1.0, 0.0}},
                                    ServiceModel{ConstantRate{0.011}, 1.0}, 2,
                                    SplitPolicy::JoinShortestQueue);
        sc.n_packets = 1000;
        sc.seed = 5;
        sc.warmup_fraction = 0.0;
        sc.quantile_eps = {0.5};
        std::vector<PacketRecord> recs;
        simulate_with_records(sc, &recs);
        // With service far slower than arrivals, JSQ must alternate: both
        // queues carry about half the packets.
        std::uint64_t count0 = 0;
        for (const auto& r : recs) count0 += r.subsystem == 0 ? 1 : 0;
        CHECK(count0 == 500);
    }
}

TEST_CASE("serve_fcfs") {
    SUBCASE("deterministic service at full spacing has unit delay") {
        Xoshiro256pp rng(2, 0);
        std::vector<double> arr(100), len(100, 1.0);
        for (int i = 0; i < 100; ++i) arr[i] = i + 1.0;
        const auto dep = serve_fcfs(arr, len, ServiceModel{ConstantRate{1.0}, 1.0}, rng);
        for (int i = 0; i < 100; ++i) CHECK(dep[i] == doctest::Approx(arr[i] + 1.0));
    }
    SUBCASE("M|M|1 mean delay matches 1/(mu - lambda)") {
        SimScenario sc;
        sc.system = single_system(ArrivalModel{PoissonPackets{1.0, 1.0}},
                                  ServiceModel{PoissonService{2.0}, 1.0});
        sc.n_packets = 10000000;
        sc.seed = 21;
        sc.quantile_eps = {1e-3};
        std::vector<PacketRecord> recs;
        simulate_with_records(sc, &recs);
        double sum = 0.0;
        for (const auto& r : recs) sum += r.t_departure - r.t_arrival;
        const double mean_delay = sum / static_cast<double>(recs.size());
        CHECK(mean_delay == doctest::Approx(1.0).epsilon(0.03));
    }
    SUBCASE("always-on channel equals the constant-rate link exactly") {
        Xoshiro256pp rng_a(3, 0), rng_b(3, 0);
        std::vector<double> arr(2000), len(2000, 1.0);
        double t = 0.0;
        Xoshiro256pp gen(4, 0);
        for (auto& a : arr) a = (t += gen.exponential(0.6));
        MarkovChannelSpec chain;
        chain.n = 2;
        // state 1 unreachable in the long run is not allowed; use a chain
        // that is on nearly always and compare against rate 2 with slack,
        // plus the exact single-state comparison below.
        chain.transition = {0.0, 1.0, 1e-12, 1.0 - 1e-12};
        chain.rates = {2.0, 2.0};
        chain.slot = 1.0;
        const auto dep_markov =
            serve_fcfs(arr, len, ServiceModel{MarkovModulated{chain, false}, 1.0}, rng_a);
        const auto dep_const = serve_fcfs(arr, len, ServiceModel{ConstantRate{2.0}, 1.0}, rng_b);
        for (std::size_t i = 0; i < arr.size(); ++i)
            CHECK(dep_markov[i] == doctest::Approx(dep_const[i]).epsilon(1e-12));
    }
    SUBCASE("strict-slot mode departs on slot boundaries") {
        Xoshiro256pp rng(6, 0);
        std::vector<double> arr{0.2, 0.3, 2.4};
        std::vector<double> len(3, 1.0);
        MarkovChannelSpec chain;
        chain.n = 2;
        chain.transition = {0.0, 1.0, 1e-12, 1.0 - 1e-12};
        chain.rates = {1.0, 1.0};
        chain.slot = 1.0;
        const auto dep =
            serve_fcfs(arr, len, ServiceModel{MarkovModulated{chain, true}, 1.0}, rng);
        for (double d : dep) CHECK(d == doctest::Approx(std::round(d)).epsilon(1e-12));
    }
    SUBCASE("non-integer packet length rejected for Poisson service") {
        Xoshiro256pp rng(8, 0);
        std::vector<double> arr{1.0}, len{1.5};
        CHECK_THROWS_AS(serve_fcfs(arr, len, ServiceModel{PoissonService{2.0}, 1.5}, rng),
                        ParameterDomainError);
    }
}

TEST_CASE("age statistics") {
    SUBCASE("deterministic sawtooth: CCDF 2-x on [1,2], peak 2, delay 1") {
        std::vector<PacketRecord> recs;
        for (int n = 1; n <= 5000; ++n)
            recs.push_back({static_cast<std::uint64_t>(n), double(n), n + 1.0, 0, 1.0});
        const auto r = age_statistics(recs, 5001.0, {0.5, 0.1, 1e-2}, 0.0, 1);
        CHECK(r.mean_age == doctest::Approx(1.5).epsilon(1e-9));
        CHECK(r.age_quantiles.at(0.5) == doctest::Approx(1.5).epsilon(1e-6));
        CHECK(r.age_quantiles.at(0.1) == doctest::Approx(1.9).epsilon(1e-6));
        CHECK(r.age_quantiles.at(1e-2) == doctest::Approx(1.99).epsilon(1e-6));
        CHECK(r.peak_age_quantiles.at(0.1) == doctest::Approx(2.0));
        CHECK(r.delay_quantiles.at(0.1) == doctest::Approx(1.0));
    }
    SUBCASE("merged records equal the min of per-subsystem ages pointwise") {
        SimScenario sc;
        sc.system = parallel_system(ArrivalModel{PoissonPackets{1.0, 0.8}},
                                    ServiceModel{PoissonService{1.0}, 1.0}, 2,
                                    SplitPolicy::RandomWeighted);
        sc.n_packets = 20000;
        sc.seed = 31;
        std::vector<PacketRecord> recs;
        simulate_with_records(sc, &recs);
        std::vector<PacketRecord> sub0, sub1;
        for (const auto& r : recs) (r.subsystem == 0 ? sub0 : sub1).push_back(r);
        const auto merged = effective_updates(recs);
        const auto u0 = effective_updates(sub0);
        const auto u1 = effective_updates(sub1);
        auto age_at = [](const std::vector<EffectiveUpdate>& u, double t) {
            auto it = std::upper_bound(u.begin(), u.end(), t,
                                       [](double v, const EffectiveUpdate& e) { return v < e.time; });
            if (it == u.begin()) return std::numeric_limits<double>::infinity();
            return t - std::prev(it)->stamp;
        };
        const double t_end = merged.back().time;
        for (int i = 0; i < 10000; ++i) {
            const double t = t_end * (i + 0.5) / 10000.0;
            const double lhs = age_at(merged, t);
            const double rhs = std::min(age_at(u0, t), age_at(u1, t));
            if (std::isinf(lhs) || std::isinf(rhs)) continue;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
    SUBCASE("insufficient effective updates") {
        std::vector<PacketRecord> recs;
        for (int n = 1; n <= 50; ++n)
            recs.push_back({static_cast<std::uint64_t>(n), double(n), n + 1.0, 0, 1.0});
        CHECK_THROWS_AS(age_statistics(recs, 51.0, {0.5}, 0.0, 1), InsufficientDataError);
    }
}

TEST_CASE("determinism and invariance") {
    SimScenario sc;
    sc.system = parallel_system(ArrivalModel{PoissonPackets{1.0, 0.7}},
                                ServiceModel{PoissonService{1.0}, 1.0}, 2,
                                SplitPolicy::RandomWeighted);
    sc.n_packets = 50000;
    sc.seed = 77;

    SUBCASE("identical seed, identical result") {
        const auto a = simulate(sc);
        const auto b = simulate(sc);
        CHECK(a.age_quantiles == b.age_quantiles);
        CHECK(a.peak_age_quantiles == b.peak_age_quantiles);
        CHECK(a.delay_quantiles == b.delay_quantiles);
        CHECK(a.mean_age == b.mean_age);
        sc.seed = 78;
        const auto c = simulate(sc);
        CHECK(a.mean_age != c.mean_age);
    }
    SUBCASE("record order does not matter") {
        std::vector<PacketRecord> recs;
        simulate_with_records(sc, &recs);
        const double horizon =
            std::max_element(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
                return a.t_departure < b.t_departure;
            })->t_departure;
        const auto before = age_statistics(recs, horizon, {1e-2}, 0.0, sc.seed);
        std::mt19937_64 shuffle_rng(999);
        std::shuffle(recs.begin(), recs.end(), shuffle_rng);
        const auto after = age_statistics(recs, horizon, {1e-2}, 0.0, sc.seed);
        CHECK(before.age_quantiles.at(1e-2) == after.age_quantiles.at(1e-2));
        CHECK(before.peak_age_quantiles.at(1e-2) == after.peak_age_quantiles.at(1e-2));
        CHECK(before.delay_quantiles.at(1e-2) == after.delay_quantiles.at(1e-2));
        CHECK(before.mean_age == after.mean_age);
    }
    SUBCASE("conservation: every arrival departs, per-subsystem FCFS order") {
        std::vector<PacketRecord> recs;
        simulate_with_records(sc, &recs);
        CHECK(recs.size() == sc.n_packets);
        std::vector<PacketRecord> by_sub[2];
        for (const auto& r : recs) {
            CHECK(r.t_departure >= r.t_arrival);
            by_sub[r.subsystem].push_back(r);
        }
        for (const auto& part : by_sub) {
            for (std::size_t i = 1; i < part.size(); ++i)
                CHECK(part[i].t_departure >= part[i - 1].t_departure);
        }
    }
}

TEST_CASE("mean age sits above the mean delay of effective updates") {
    SimScenario sc;
    sc.system = single_system(ArrivalModel{PoissonPackets{1.0, 1.0}},
                              ServiceModel{PoissonService{2.0}, 1.0});
    sc.n_packets = 200000;
    sc.seed = 13;
    std::vector<PacketRecord> recs;
    const auto res = simulate_with_records(sc, &recs);
    const auto updates = effective_updates(recs);
    // FCFS single queue: every departure is effective, delay = age at reset
    double mean_delay = 0.0;
    for (const auto& r : recs) mean_delay += r.t_departure - r.t_arrival;
    mean_delay /= static_cast<double>(recs.size());
    CHECK(res.mean_age >= mean_delay);
    CHECK(res.mean_age >= 1.0 / 2.0);  // l over mean service rate
    CHECK(updates.size() == recs.size());
}

TEST_CASE("on-off memory effect: parallel beats the pooled channel in simulation") {
    // p_on=0.9, beta=2*beta0: two independent mean-rate-1 channels against a
    // single mean-rate-2 channel at the same total capacity.
    const auto chain_half = onoff_transition({0.9, 2.0 / 0.09, 1.0 / 0.9});
    const auto chain_full = onoff_transition({0.9, 2.0 / 0.09, 2.0 / 0.9});
    auto best_q = [&](const SystemSpec& base) {
        double best = 1e300;
        for (double w : {0.8, 1.2, 1.8, 2.6}) {
            SimScenario sc;
            sc.system = base;
            sc.system.external_arrivals = base.external_arrivals.with_interval(w);
            sc.n_packets = 2000000;
            sc.seed = 99;
            sc.quantile_eps = {1e-3};
            best = std::min(best, simulate(sc).age_quantiles.at(1e-3));
        }
        return best;
    };
    const double single = best_q(single_system(ArrivalModel{PoissonPackets{1.0, 1.0}},
                                               ServiceModel{MarkovModulated{chain_full, false}, 1.0}));
    const double parallel = best_q(parallel_system(ArrivalModel{PoissonPackets{1.0, 1.0}},
                                                   ServiceModel{MarkovModulated{chain_half, false}, 1.0},
                                                   2, SplitPolicy::RandomWeighted));
    CHECK(parallel < single);
}
