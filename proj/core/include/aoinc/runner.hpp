// runner.hpp - Drives sweeps over the update interval w: analytical bound
// rows, simulation rows, and the joined bound-versus-simulation comparison
// with its dominance check. Rows are independent and are dispatched to a
// small worker pool; output order follows the w grid regardless of
// completion order.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aoinc/analyzer.hpp"
#include "aoinc/scenario.hpp"

namespace aoinc {

struct BoundRow {
    double w = 0.0;
    bool stable = false;
    std::optional<double> age_quantile;
    std::optional<double> delay_quantile;
    ThetaTriple theta;
    std::optional<double> best_weight;  // weight enumeration only
    std::string error;
};

struct SimRow {
    double w = 0.0;
    std::optional<double> age_quantile;
    std::optional<double> peak_age_quantile;
    std::optional<double> delay_quantile;
    std::optional<double> mean_age;
    std::uint64_t n_packets = 0;
    std::uint64_t seed = 0;
    std::string error;
};

struct CompareRow {
    BoundRow bound;
    SimRow sim;
    std::optional<bool> dominance;  // bound quantile >= sim quantile (with slack)
};

struct RunOptions {
    int jobs = 1;
    // Test hook: scales bound probabilities before inversion. Values below 1
    // tighten the bound artificially so the dominance self-test can fail.
    double bound_scale = 1.0;
};

std::vector<BoundRow> bound_sweep(const ScenarioFile& scenario, double eps,
                                  const RunOptions& opts);
std::vector<SimRow> sim_sweep(const ScenarioFile& scenario, double eps, std::uint64_t n_packets,
                              std::uint64_t seed, const RunOptions& opts);

// Bound and simulation at the same eps; a row violates dominance when the
// simulated quantile exceeds the bound quantile by more than the relative
// statistical slack 2/sqrt(eps * n_packets).
std::vector<CompareRow> compare_sweep(const ScenarioFile& scenario, double eps,
                                      std::uint64_t n_packets, std::uint64_t seed,
                                      const RunOptions& opts);

std::string bound_csv(const std::vector<BoundRow>& rows, bool with_best_weight);
std::string sim_csv(const std::vector<SimRow>& rows);
std::string compare_csv(const std::vector<CompareRow>& rows);

bool any_dominance_violation(const std::vector<CompareRow>& rows);

// Single-row helpers shared with the acceptance suite.
BoundRow bound_row_for(const SystemSpec& system, double w, double eps, double bound_scale = 1.0);
SimRow sim_row_for(const SystemSpec& system, double w, double eps, std::uint64_t n_packets,
                   std::uint64_t seed, double warmup_fraction = 0.1);

}  // namespace aoinc
