// envelopes.hpp - Derives (rate, profile) envelope parameters from arrival
// and service models. Rates are moment-generating-function envelopes: the
// arrival rate grows and the service rate shrinks as theta increases, both
// pinned between the mean and the peak.
#pragma once

#include <optional>

#include "aoinc/markov.hpp"
#include "aoinc/models.hpp"
#include "aoinc/profile.hpp"

namespace aoinc {

// rho_A(theta) = (e^{theta l} - 1) / (theta w) for Poisson packet arrivals.
// Below |theta * l| = 1e-8 a second-order expansion avoids cancellation;
// the theta -> 0 limit is the mean rate l/w.
double poisson_arrival_rate(double packet_length, double mean_interarrival, double theta);

struct PoissonArrivalProfiles {
    ExpProfile overflow;         // over b (bits): e^{-theta b}
    ExpProfile lower_underflow;  // over u (time): e^{-u/w}
    double l_min = 0.0;
};

PoissonArrivalProfiles poisson_arrival_profiles(double packet_length, double mean_interarrival,
                                                double theta);

// rho_S(theta) = r (1 - e^{-theta}) / theta for a Poisson service process;
// limit r as theta -> 0, with the same small-theta expansion.
double poisson_service_rate(double rate, double theta);

// ---------------------------------------------------------------------------
// Model-level factories used by the bound evaluators.

struct UpperArrivalEnvelope {
    double rate = 0.0;    // rho_A(theta), bits/time
    ExpProfile overflow;  // over b (bits)
};

struct LowerArrivalEnvelope {
    double l_min = 0.0;
    ExpProfile underflow;  // over u (time)
};

struct ServiceEnvelope {
    double rate = 0.0;                    // rho_S(theta), bits/time
    std::optional<ExpProfile> underflow;  // over b (bits); absent = deterministic
};

// Upper arrival envelope at theta; defined for Poisson arrivals only
// (periodic arrivals go through the dedicated periodic bound).
UpperArrivalEnvelope upper_arrival_envelope(const ArrivalModel& arrival, double theta);

// Lower arrival envelope; defined for Poisson arrivals only.
LowerArrivalEnvelope lower_arrival_envelope(const ArrivalModel& arrival);

// Lower service envelope at theta for any service model. Constant-rate
// service has an identically-zero underflow profile.
ServiceEnvelope service_envelope(const ServiceModel& service, double theta);

// Bundle consumed by the general age bound: one upper and one lower arrival
// envelope plus two service envelopes with individually chosen theta, the
// first for the queueing term and the second for the idle-waiting term.
struct EnvelopeSet {
    std::optional<UpperArrivalEnvelope> upper_arrival;
    std::optional<LowerArrivalEnvelope> lower_arrival;
    ServiceEnvelope service_primary;
    ServiceEnvelope service_secondary;
};

// Tags a service envelope with the packetizer loss: downstream evaluators
// subtract l_max from the rate term of the first bound argument and delay
// the second by l_max / rho_S'.
struct PacketizedServiceEnvelope {
    ServiceEnvelope envelope;
    double l_max = 0.0;
};

PacketizedServiceEnvelope apply_packetizer(const ServiceEnvelope& envelope, double l_max);

}  // namespace aoinc
