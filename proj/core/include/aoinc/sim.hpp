// sim.hpp - Discrete-event simulator for single and parallel FCFS systems:
// deterministic, Erlang, and slotted Markov on-off servers under random
// weighted splitting, round robin, and join-the-shortest-queue.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "aoinc/models.hpp"
#include "aoinc/rng.hpp"

namespace aoinc {

struct PacketRecord {
    std::uint64_t index = 0;
    double t_arrival = 0.0;
    double t_departure = 0.0;
    std::uint32_t subsystem = 0;
    double length = 0.0;
};

struct SimScenario {
    SystemSpec system;
    std::uint64_t n_packets = 1000000;
    std::uint64_t seed = 1;
    std::vector<double> quantile_eps{1e-3};
    double warmup_fraction = 0.1;

    void validate() const;
};

struct SimResult {
    std::map<double, double> age_quantiles;       // eps -> x, time-average age CCDF
    std::map<double, double> peak_age_quantiles;  // eps -> x, per-reset peak samples
    std::map<double, double> delay_quantiles;     // eps -> x, per-packet delay
    double mean_age = 0.0;
    std::uint64_t samples_used = 0;  // effective updates after warmup
    std::uint64_t seed = 0;
};

// Arrival time stamps for the first n packets: Poisson draws i.i.d.
// exponential inter-arrivals; periodic arrivals sit at offset + k*period
// for k >= 1 (none at t = 0).
std::vector<double> generate_arrivals(const ArrivalModel& model, std::uint64_t n,
                                      Xoshiro256pp& rng);

// Subsystem index per packet. RandomWeighted draws i.i.d. categorical;
// RoundRobin cycles in arrival order; JSQ needs server state and is applied
// inside simulate().
std::vector<std::uint32_t> split_random_weighted(std::uint64_t n, const std::vector<double>& weights,
                                                 Xoshiro256pp& rng);
std::vector<std::uint32_t> split_round_robin(std::uint64_t n, std::uint32_t k);

// FCFS departure times for one subsystem fed with the given arrival times
// and per-packet lengths.
std::vector<double> serve_fcfs(const std::vector<double>& arrivals,
                               const std::vector<double>& lengths, const ServiceModel& service,
                               Xoshiro256pp& rng);

// Effective-update sequence of a merged record set: the departure epochs at
// which the maximum delivered arrival stamp increases, paired with that
// stamp. Departures carrying an older stamp than one already delivered are
// obsolete and do not appear. Exact departure-time ties are coalesced.
struct EffectiveUpdate {
    double time = 0.0;
    double stamp = 0.0;
};
std::vector<EffectiveUpdate> effective_updates(std::vector<PacketRecord> records);

// Time-average age, peak-age, and delay quantiles of a merged record set.
// The age sawtooth is integrated segment by segment (no sampling grid);
// quantiles invert the exact time-above function. `horizon` closes the last
// segment. Throws InsufficientDataError with fewer than 100 effective
// updates after warmup.
SimResult age_statistics(const std::vector<PacketRecord>& records, double horizon,
                         const std::vector<double>& quantile_eps, double warmup_time,
                         std::uint64_t seed);

// Full pipeline: generate, split, serve, merge, measure.
// RNG substreams per run: 0 arrivals, 1 splitting, 2 + i for subsystem i;
// all derived from (seed, stream_id) as documented in rng.hpp.
SimResult simulate(const SimScenario& scenario);

// As simulate(), but also returns the merged packet records (tests use the
// raw trajectories).
SimResult simulate_with_records(const SimScenario& scenario, std::vector<PacketRecord>* records_out);

}  // namespace aoinc
