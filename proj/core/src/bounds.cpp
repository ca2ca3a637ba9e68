#include "aoinc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace aoinc {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Tail of a single deviation profile; an absent profile is identically zero
// deviation, so the tail is an indicator of a non-positive argument.
double profile_tail(const std::optional<ExpProfile>& p, double b) {
    if (!p) return b > 0.0 ? 0.0 : 1.0;
    return clamp01(p->evaluate(b));
}

}  // namespace

double age_bound_general(const EnvelopeSet& env, double l_max, double x) {
    if (env.upper_arrival && env.upper_arrival->rate > env.service_primary.rate)
        throw InfeasibleThetaError("age bound: rho_A exceeds rho_S (stability violated)");
    if (!(env.service_primary.rate > 0.0) || !(env.service_secondary.rate > 0.0))
        throw ParameterDomainError("age bound: service envelope rates must be positive");
    if (x < l_max / std::min(env.service_primary.rate, env.service_secondary.rate)) return 1.0;

    std::optional<ExpProfile> overflow;
    if (env.upper_arrival) overflow = env.upper_arrival->overflow;
    const double queueing =
        deviation_sum_tail(env.service_primary.underflow, overflow,
                           env.service_primary.rate * x - l_max);

    // eps_T(u) = eps_S'(rho_S' u): the underflow profile over bits becomes a
    // profile over time with decay scaled by the envelope rate.
    std::optional<ExpProfile> eps_T;
    if (env.service_secondary.underflow)
        eps_T = ExpProfile(env.service_secondary.underflow->prefactor,
                           env.service_secondary.underflow->decay * env.service_secondary.rate);
    std::optional<ExpProfile> gap;
    if (env.lower_arrival) gap = env.lower_arrival->underflow;
    const double idle =
        deviation_sum_tail(eps_T, gap, x - l_max / env.service_secondary.rate);

    return clamp01(queueing + idle);
}

double age_bound_constant_rate(const UpperArrivalEnvelope& upper,
                               const LowerArrivalEnvelope& lower, double rate, double l_max,
                               double x) {
    if (!(rate > 0.0)) throw ParameterDomainError("age bound: rate must be positive");
    if (upper.rate > rate)
        throw InfeasibleThetaError("age bound: rho_A exceeds the service rate");
    if (x < l_max / rate) return 1.0;
    return clamp01(upper.overflow.evaluate(rate * x - l_max) +
                   lower.underflow.evaluate(x - l_max / rate));
}

double age_bound_periodic(const ServiceEnvelope& primary, const ServiceEnvelope& secondary,
                          double packet_length, double period, double x, double phase) {
    const double l = packet_length, w = period;
    if (!(l > 0.0) || !(w > 0.0)) throw ParameterDomainError("periodic age bound: l, w must be positive");
    if (phase < 0.0 || phase >= w)
        throw ParameterDomainError("periodic age bound: phase must lie in [0, period)");
    if (l / w > primary.rate)
        throw InfeasibleThetaError("periodic age bound: l/w exceeds rho_S (stability violated)");
    if (x < w + l / std::min(primary.rate, secondary.rate)) return 1.0;

    const double queue_arg =
        primary.rate * (x - std::max(0.0, l / primary.rate - phase)) - l;
    const double idle_arg = secondary.rate * (x - (w - phase)) - l;
    return clamp01(profile_tail(primary.underflow, queue_arg) +
                   profile_tail(secondary.underflow, idle_arg));
}

double delay_bound(const EnvelopeSet& env, double x) {
    if (env.upper_arrival && env.upper_arrival->rate > env.service_primary.rate)
        throw InfeasibleThetaError("delay bound: rho_A exceeds rho_S (stability violated)");
    std::optional<ExpProfile> overflow;
    if (env.upper_arrival) overflow = env.upper_arrival->overflow;
    return clamp01(deviation_sum_tail(env.service_primary.underflow, overflow,
                                      env.service_primary.rate * x));
}

double parallel_ccdf(const std::vector<BoundCurve>& per_subsystem, double x) {
    double prod = 1.0;
    for (const auto& c : per_subsystem) prod *= c.eval(x);
    return prod;
}

BoundCurve parallel_ccdf_curve(std::vector<BoundCurve> per_subsystem) {
    if (per_subsystem.empty()) throw ParameterDomainError("parallel_ccdf: no subsystems");
    double floor = per_subsystem.front().validity_floor();
    for (const auto& c : per_subsystem) floor = std::min(floor, c.validity_floor());
    auto curves = std::make_shared<std::vector<BoundCurve>>(std::move(per_subsystem));
    return BoundCurve(floor, [curves](double x) {
        BoundEval out = curves->front().eval_point(x);
        double prod = out.probability;
        for (std::size_t i = 1; i < curves->size(); ++i) prod *= (*curves)[i].eval(x);
        out.probability = prod;
        return out;
    });
}

double invert_quantile(const BoundCurve& curve, double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw ParameterDomainError("invert_quantile: eps must lie in (0,1)");
    constexpr double kBracketCap = 1e6;
    constexpr double kTolX = 1e-6;

    const double floor = curve.validity_floor();
    if (curve.eval(floor) <= eps) return floor;

    double lo = floor;
    double step = std::max(1.0, std::fabs(floor));
    double hi = floor + step;
    while (curve.eval(hi) > eps) {
        lo = hi;
        step *= 2.0;
        hi = floor + step;
        if (hi > kBracketCap)
            throw UnboundedQuantileError("invert_quantile: bound stays above eps up to x = 1e6");
    }
    while (hi - lo > kTolX) {
        const double mid = 0.5 * (lo + hi);
        if (curve.eval(mid) <= eps)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace aoinc
