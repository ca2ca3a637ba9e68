// markov.hpp - Markov-modulated service envelopes: on-off parameterization,
// spectral radius of P*R(-theta), and the martingale underflow profile.
#pragma once

#include <vector>

#include "aoinc/models.hpp"
#include "aoinc/profile.hpp"

namespace aoinc {

// Builds the two-state chain (state 0 = off with rate 0, state 1 = on with
// rate `capacity`) whose steady-state on probability and burstiness match
// the parameters: p_on = p01/(p01+p10) and beta = 1/p01 + 1/p10. Infeasible
// combinations (beta < beta_0, or probabilities outside (0,1]) are rejected.
MarkovChannelSpec onoff_transition(const OnOffParams& params);

// Spectral radius of P * diag(exp(-theta * r_i)).
// n = 2 uses the closed-form quadratic; larger chains use power iteration
// with a 1e-12 relative tolerance on -ln(sp) and a 1e5 iteration cap.
double markov_spectral_radius(const MarkovChannelSpec& chain, double theta);

// Power-iteration path regardless of n; exposed for cross-checking the
// closed form.
double markov_spectral_radius_power(const MarkovChannelSpec& chain, double theta);

// Right Perron eigenvector of P * diag(exp(-theta * r_i)), normalized so the
// minimum component is 1.
std::vector<double> markov_envelope_eigenvector(const MarkovChannelSpec& chain, double theta);

struct MarkovEnvelope {
    double rate = 0.0;       // rho_S(theta) in bits per unit time
    ExpProfile profile;      // underflow profile over b (bits)
};

// Lower service envelope of the modulated channel:
//   rho_S(theta) = -ln sp(P R(-theta)) / theta   (bits/slot, then / slot)
//   eps_S(b) = E[h(y_0)] / min_{i : rho_S(theta) > r_i} h(i) * exp(-theta b)
// with h the Perron eigenvector above and the expectation over the
// stationary distribution. Throws EnvelopeInapplicableError when no state
// has rate below rho_S(theta).
MarkovEnvelope markov_service_envelope(const MarkovChannelSpec& chain, double theta);

}  // namespace aoinc
