// errors.hpp - Exception hierarchy shared by the envelope, bound, and simulation code.
#pragma once

#include <stdexcept>
#include <string>

namespace aoinc {

// Invalid model parameter (non-positive rate, weight out of range, ...).
struct ParameterDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested burstiness below the memoryless floor, or transition
// probabilities outside (0,1].
struct InfeasibleBurstinessError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// The Markov service envelope has no state with rate below the envelope
// rate, so the martingale prefactor is undefined.
struct EnvelopeInapplicableError : std::domain_error {
    using std::domain_error::domain_error;
};

// Eigensolve or another iteration failed to converge.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A theta tuple violates the stability condition rho_A <= rho_S.
struct InfeasibleThetaError : std::domain_error {
    using std::domain_error::domain_error;
};

// No feasible theta exists at all: mean arrival rate >= mean service rate.
struct InfeasibleSystemError : std::domain_error {
    using std::domain_error::domain_error;
};

// Bound never drops below the requested probability within the bracket cap.
struct UnboundedQuantileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simulation produced too few effective updates to estimate quantiles.
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scheduling policy has no analytical bound; simulation is the only path.
struct SimulationOnlyPolicyError : std::domain_error {
    using std::domain_error::domain_error;
};

// Scenario file failed to parse or validate.
struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace aoinc
