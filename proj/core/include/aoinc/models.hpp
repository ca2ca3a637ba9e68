// models.hpp - Declarative descriptions of traffic, channels, and systems.
// Envelope derivation, bound evaluation, and simulation all consume these.
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "aoinc/errors.hpp"

namespace aoinc {

// ---------------------------------------------------------------------------
// Arrival models

// Poisson packet arrivals: constant packet length (bits), exponential
// inter-arrival times with the given mean (time).
struct PoissonPackets {
    double packet_length = 1.0;
    double mean_interarrival = 1.0;
};

// Periodic arrivals A(t) = l * floor((t+o)/w): packets of length l at times
// o + k*w for k >= 1 (no arrival at t = 0).
struct PeriodicArrivals {
    double packet_length = 1.0;
    double period = 1.0;
    double offset = 0.0;
};

struct ArrivalModel {
    std::variant<PoissonPackets, PeriodicArrivals> kind;

    double packet_length() const;
    double mean_interarrival() const;  // w (mean for Poisson, exact for periodic)
    double mean_rate() const { return packet_length() / mean_interarrival(); }
    bool is_poisson() const { return std::holds_alternative<PoissonPackets>(kind); }
    bool is_periodic() const { return std::holds_alternative<PeriodicArrivals>(kind); }

    void validate() const;

    // Same model with the mean inter-arrival time (Poisson) or period
    // (periodic) replaced; used when sweeps rescale the update interval.
    ArrivalModel with_interval(double w) const;
};

// ---------------------------------------------------------------------------
// Service models

// Work-conserving link with fixed rate r (bits/time).
struct ConstantRate {
    double rate = 1.0;
};

// Poisson service process with mean rate r (bits/time); one unit of service
// completes one bit, so a packet of l bits takes Erlang(l, r) time.
struct PoissonService {
    double rate = 1.0;
};

// Service modulated by a discrete-time Markov chain. `transition` is an
// n x n row-stochastic matrix stored row-major; rates[i] is the service in
// state i in bits per slot; `slot` is the duration of one chain step.
struct MarkovChannelSpec {
    std::size_t n = 0;
    std::vector<double> transition;  // row-major n*n
    std::vector<double> rates;       // bits per slot
    double slot = 1.0;

    double p(std::size_t i, std::size_t j) const { return transition[i * n + j]; }
    double mean_rate_per_slot() const;                 // sum_i pi_i r_i
    double mean_rate() const { return mean_rate_per_slot() / slot; }
    std::vector<double> stationary_distribution() const;

    // Row sums within 1e-12 of one, non-negative entries, at least one
    // positive rate, and an irreducible transition graph.
    void validate() const;
};

struct MarkovModulated {
    MarkovChannelSpec chain;
    bool strict_slot = false;  // simulator: departures only at slot boundaries
};

struct ServiceModel {
    std::variant<ConstantRate, PoissonService, MarkovModulated> kind;
    double l_max = 1.0;  // maximum packet length fed to this server (bits)

    double mean_rate() const;
    bool is_constant_rate() const { return std::holds_alternative<ConstantRate>(kind); }
    bool is_markov() const { return std::holds_alternative<MarkovModulated>(kind); }
    void validate() const;
};

// ---------------------------------------------------------------------------
// On-off (Gilbert-Elliott) channel parameterization

// p_on: steady-state on probability. burstiness: beta = 1/p_12 + 1/p_21,
// the mean time to change state twice, measured in slots. capacity: bits
// per slot in the on state. The memoryless floor is beta_0 = 1/(p_on p_off).
struct OnOffParams {
    double p_on = 0.9;
    double burstiness = 0.0;
    double capacity = 1.0;

    double beta0() const { return 1.0 / (p_on * (1.0 - p_on)); }
    void validate() const;
};

// ---------------------------------------------------------------------------
// Systems: subsystems plus a splitting policy

enum class SplitPolicy { RandomWeighted, RoundRobin, JoinShortestQueue };

struct Splitting {
    SplitPolicy policy = SplitPolicy::RandomWeighted;
    std::vector<double> weights;     // RandomWeighted only; positive, sums to 1
    bool enumerate_weights = false;  // search the weight simplex (two subsystems)

    void validate(std::size_t n_subsystems) const;
};

struct Subsystem {
    ArrivalModel arrival;
    ServiceModel service;
};

// One or more subsystems with the splitting policy that produced their
// arrival streams. `external_arrivals` is the stream before splitting; the
// per-subsystem arrival models are derived from it (see derive_subsystem_arrivals).
struct SystemSpec {
    ArrivalModel external_arrivals;
    Splitting splitting;
    std::vector<ServiceModel> services;

    void validate() const;

    // True when an analytical bound exists: RandomWeighted over Poisson
    // external arrivals, or RoundRobin over periodic arrivals. Single
    // subsystems always qualify. JSQ is simulation-only.
    bool has_analytic_path() const;

    // Per-subsystem arrival models induced by the splitting policy:
    // RandomWeighted gives subsystem i a Poisson stream with mean
    // inter-arrival w/weight_i; RoundRobin over period-w arrivals gives
    // period k*w with offset i*w.
    std::vector<ArrivalModel> derive_subsystem_arrivals() const;

    std::vector<Subsystem> derive_subsystems() const;
};

}  // namespace aoinc
