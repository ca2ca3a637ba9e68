// profile.hpp - Exponential overflow/underflow profiles, the common currency
// of all statistical envelopes in this library.
#pragma once

#include <cmath>

#include "aoinc/errors.hpp"

namespace aoinc {

// eps(b) = prefactor * exp(-decay * b). Non-increasing, continuous and
// non-negative for b >= 0. The argument unit is bits for b-profiles and
// time for u-profiles; decay is per unit of argument.
struct ExpProfile {
    double prefactor = 1.0;
    double decay = 1.0;

    ExpProfile() = default;
    ExpProfile(double prefactor_, double decay_) : prefactor(prefactor_), decay(decay_) {
        if (!(prefactor > 0.0) || !std::isfinite(prefactor))
            throw ParameterDomainError("ExpProfile: prefactor must be positive and finite");
        if (!(decay > 0.0) || !std::isfinite(decay))
            throw ParameterDomainError("ExpProfile: decay must be positive and finite");
    }

    double evaluate(double b) const { return prefactor * std::exp(-decay * b); }
};

}  // namespace aoinc
