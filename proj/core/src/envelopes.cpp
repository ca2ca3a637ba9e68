#include "aoinc/envelopes.hpp"

#include <cmath>

namespace aoinc {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterDomainError(std::string(what) + " must be positive");
}

}  // namespace

double poisson_arrival_rate(double packet_length, double mean_interarrival, double theta) {
    require_positive(packet_length, "poisson arrival rate: packet length");
    require_positive(mean_interarrival, "poisson arrival rate: mean inter-arrival");
    require_positive(theta, "poisson arrival rate: theta");
    const double tl = theta * packet_length;
    if (tl < 1e-8) {
        // (e^x - 1)/x = 1 + x/2 + x^2/6 + O(x^3)
        return packet_length / mean_interarrival * (1.0 + tl / 2.0 + tl * tl / 6.0);
    }
    return std::expm1(tl) / (theta * mean_interarrival);
}

PoissonArrivalProfiles poisson_arrival_profiles(double packet_length, double mean_interarrival,
                                                double theta) {
    require_positive(packet_length, "poisson arrival profiles: packet length");
    require_positive(mean_interarrival, "poisson arrival profiles: mean inter-arrival");
    require_positive(theta, "poisson arrival profiles: theta");
    return PoissonArrivalProfiles{ExpProfile(1.0, theta), ExpProfile(1.0, 1.0 / mean_interarrival),
                                  packet_length};
}

double poisson_service_rate(double rate, double theta) {
    require_positive(rate, "poisson service rate: rate");
    require_positive(theta, "poisson service rate: theta");
    if (theta < 1e-8) {
        // (1 - e^{-t})/t = 1 - t/2 + t^2/6 + O(t^3)
        return rate * (1.0 - theta / 2.0 + theta * theta / 6.0);
    }
    return -rate * std::expm1(-theta) / theta;
}

UpperArrivalEnvelope upper_arrival_envelope(const ArrivalModel& arrival, double theta) {
    if (!arrival.is_poisson())
        throw ParameterDomainError("upper arrival envelope: only defined for Poisson arrivals");
    const auto& p = std::get<PoissonPackets>(arrival.kind);
    return UpperArrivalEnvelope{poisson_arrival_rate(p.packet_length, p.mean_interarrival, theta),
                                ExpProfile(1.0, theta)};
}

LowerArrivalEnvelope lower_arrival_envelope(const ArrivalModel& arrival) {
    if (!arrival.is_poisson())
        throw ParameterDomainError("lower arrival envelope: only defined for Poisson arrivals");
    const auto& p = std::get<PoissonPackets>(arrival.kind);
    return LowerArrivalEnvelope{p.packet_length, ExpProfile(1.0, 1.0 / p.mean_interarrival)};
}

ServiceEnvelope service_envelope(const ServiceModel& service, double theta) {
    require_positive(theta, "service envelope: theta");
    if (auto* c = std::get_if<ConstantRate>(&service.kind))
        return ServiceEnvelope{c->rate, std::nullopt};
    if (auto* ps = std::get_if<PoissonService>(&service.kind))
        return ServiceEnvelope{poisson_service_rate(ps->rate, theta), ExpProfile(1.0, theta)};
    const auto env = markov_service_envelope(std::get<MarkovModulated>(service.kind).chain, theta);
    return ServiceEnvelope{env.rate, env.profile};
}

PacketizedServiceEnvelope apply_packetizer(const ServiceEnvelope& envelope, double l_max) {
    if (!(l_max > 0.0) || !std::isfinite(l_max))
        throw ParameterDomainError("packetizer: l_max must be positive");
    return PacketizedServiceEnvelope{envelope, l_max};
}

}  // namespace aoinc
