// scenario.hpp - Scenario file schema (JSON, schema_version 1): system
// description, sweep grid, target probabilities, and simulation settings.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aoinc/models.hpp"
#include "aoinc/sim.hpp"

namespace aoinc {

struct SweepGrid {
    double w_min = 1.0;
    double w_max = 1.0;
    int n_points = 1;
    bool log_scale = true;

    std::vector<double> points() const;
};

enum class OutputKind { AgeBound, DelayBound, AgeSim, PeakAgeSim, DelaySim };

struct ScenarioFile {
    int schema_version = 1;
    SystemSpec system;
    std::optional<SweepGrid> sweep;  // absent: single row at the system's own w
    double epsilon_bound = 1e-6;
    double epsilon_sim = 1e-3;
    std::uint64_t n_packets = 1000000;
    std::uint64_t seed = 1;
    double warmup_fraction = 0.1;
    std::vector<OutputKind> outputs;  // empty: all outputs the command supports

    std::vector<double> sweep_points() const;
    void validate() const;
};

// Parses and validates a scenario document. Errors carry the offending
// field path. Text must be UTF-8 JSON.
ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::string& path);

// Normalized JSON text; parse_scenario(dump_scenario(s)) describes the same
// scenario.
std::string dump_scenario(const ScenarioFile& scenario);

}  // namespace aoinc
