#include "aoinc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aoinc {

MarkovChannelSpec onoff_transition(const OnOffParams& params) {
    params.validate();
    // p_on = p01/(p01+p10) and beta = 1/p01 + 1/p10 = beta_0/(p01+p10), so
    // the probability scale is s = beta_0/beta.
    const double s = params.beta0() / params.burstiness;
    const double p01 = params.p_on * s;          // off -> on
    const double p10 = (1.0 - params.p_on) * s;  // on -> off
    if (!(p01 > 0.0) || !(p10 > 0.0) || p01 > 1.0 || p10 > 1.0)
        throw InfeasibleBurstinessError("on-off channel: derived transition probability outside (0,1]");
    MarkovChannelSpec chain;
    chain.n = 2;
    chain.transition = {1.0 - p01, p01, p10, 1.0 - p10};
    chain.rates = {0.0, params.capacity};
    chain.slot = 1.0;
    chain.validate();
    return chain;
}

namespace {

// Largest eigenvalue of the 2x2 matrix M = P R(-theta), returned as
// lambda - 1 to stay accurate when theta is tiny. Uses
//   lambda - 1 = (tr(M) - 2 + sqrt(D)) / 2,  D = (m00-m11)^2 + 4 m01 m10,
// with the cancellation-free rearrangement
//   -u + sqrt(D) = (D - u^2) / (sqrt(D) + u),  u = 2 - tr(M) >= 0,
//   D - u^2 = 4 [p10*ea + p01*eb - det(P)*ea*eb],
// where ea = expm1(-theta r0), eb = expm1(-theta r1). The identity for
// D - u^2 uses tr(P) - 1 - det(P) = 0 for row-stochastic P.
double two_state_lambda_minus_one(const MarkovChannelSpec& c, double theta) {
    const double p00 = c.p(0, 0), p01 = c.p(0, 1), p10 = c.p(1, 0), p11 = c.p(1, 1);
    const double ea = std::expm1(-theta * c.rates[0]);
    const double eb = std::expm1(-theta * c.rates[1]);
    const double m00 = p00 * (1.0 + ea), m01 = p01 * (1.0 + eb);
    const double m10 = p10 * (1.0 + ea), m11 = p11 * (1.0 + eb);
    const double detP = p00 * p11 - p01 * p10;
    const double u = 2.0 - (m00 + m11);
    const double D = (m00 - m11) * (m00 - m11) + 4.0 * m01 * m10;
    const double d_minus_u2 = 4.0 * (p10 * ea + p01 * eb - detP * ea * eb);
    const double denom = std::sqrt(std::max(D, 0.0)) + u;
    if (denom <= 0.0) throw NumericError("two-state eigenvalue: degenerate matrix");
    return d_minus_u2 / (2.0 * denom);
}

std::vector<double> matvec_PR(const MarkovChannelSpec& c, double theta,
                              const std::vector<double>& v) {
    const std::size_t n = c.n;
    std::vector<double> scaled(n), out(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) scaled[j] = std::exp(-theta * c.rates[j]) * v[j];
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += c.p(i, j) * scaled[j];
        out[i] = acc;
    }
    return out;
}

}  // namespace

double markov_spectral_radius_power(const MarkovChannelSpec& chain, double theta) {
    const std::size_t n = chain.n;
    std::vector<double> v(n, 1.0);
    double log_lambda_prev = std::numeric_limits<double>::quiet_NaN();
    constexpr int kMaxIter = 100000;
    for (int it = 0; it < kMaxIter; ++it) {
        auto w = matvec_PR(chain, theta, v);
        const double norm = *std::max_element(w.begin(), w.end());
        if (!(norm > 0.0)) throw NumericError("power iteration: vector collapsed to zero");
        for (double& x : w) x /= norm;
        // Rayleigh-style estimate: lambda ~ <v, Mv>/<v, v> on the normalized
        // iterate; for non-negative irreducible M this converges linearly.
        auto mv = matvec_PR(chain, theta, w);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            num += w[i] * mv[i];
            den += w[i] * w[i];
        }
        const double lambda = num / den;
        if (!(lambda > 0.0)) throw NumericError("power iteration: nonpositive eigenvalue estimate");
        const double log_lambda = std::log(lambda);
        if (it > 2 && std::fabs(log_lambda - log_lambda_prev) <=
                          1e-12 * std::max(std::fabs(log_lambda), 1e-300))
            return lambda;
        log_lambda_prev = log_lambda;
        v = std::move(w);
    }
    throw NumericError("power iteration: no convergence within iteration cap");
}

double markov_spectral_radius(const MarkovChannelSpec& chain, double theta) {
    if (chain.n == 2) return 1.0 + two_state_lambda_minus_one(chain, theta);
    return markov_spectral_radius_power(chain, theta);
}

std::vector<double> markov_envelope_eigenvector(const MarkovChannelSpec& chain, double theta) {
    const std::size_t n = chain.n;
    std::vector<double> h;
    if (n == 2) {
        const double lambda = markov_spectral_radius(chain, theta);
        const double m00 = chain.p(0, 0) * std::exp(-theta * chain.rates[0]);
        const double m01 = chain.p(0, 1) * std::exp(-theta * chain.rates[1]);
        const double m10 = chain.p(1, 0) * std::exp(-theta * chain.rates[0]);
        const double m11 = chain.p(1, 1) * std::exp(-theta * chain.rates[1]);
        // (M - lambda I) h = 0; pick the row with the better-conditioned pivot.
        if (std::fabs(lambda - m00) >= std::fabs(lambda - m11))
            h = {m01, lambda - m00};
        else
            h = {lambda - m11, m10};
        if (h[0] <= 0.0 || h[1] <= 0.0) {
            // Reducible-direction fallback (e.g. rank-one memoryless chains
            // where one component vanishes): the eigenvector is constant.
            h = {1.0, 1.0};
        }
    } else {
        // Power iteration on the vector; the normalized iterate converges to
        // the Perron direction.
        h.assign(n, 1.0);
        double prev_delta = std::numeric_limits<double>::infinity();
        constexpr int kMaxIter = 100000;
        int it = 0;
        for (; it < kMaxIter; ++it) {
            auto w = matvec_PR(chain, theta, h);
            const double norm = *std::max_element(w.begin(), w.end());
            if (!(norm > 0.0)) throw NumericError("eigenvector iteration: zero vector");
            double delta = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] /= norm;
                delta = std::max(delta, std::fabs(w[i] - h[i]));
            }
            h = std::move(w);
            if (delta <= 1e-14) break;
            prev_delta = delta;
        }
        if (it == kMaxIter && prev_delta > 1e-10)
            throw NumericError("eigenvector iteration: no convergence");
    }
    const double hmin = *std::min_element(h.begin(), h.end());
    if (!(hmin > 0.0)) throw NumericError("markov envelope: non-positive eigenvector component");
    for (double& x : h) x /= hmin;
    return h;
}

MarkovEnvelope markov_service_envelope(const MarkovChannelSpec& chain, double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta))
        throw ParameterDomainError("markov envelope: theta must be positive");
    chain.validate();

    double rho_slot;  // bits per slot
    if (chain.n == 2) {
        const double lm1 = two_state_lambda_minus_one(chain, theta);
        rho_slot = -std::log1p(lm1) / theta;
    } else if (theta * *std::max_element(chain.rates.begin(), chain.rates.end()) < 1e-8) {
        // -ln(sp)/theta loses all precision when sp is within rounding of 1;
        // return the theta -> 0 limit, the stationary mean rate.
        rho_slot = chain.mean_rate_per_slot();
    } else {
        rho_slot = -std::log(markov_spectral_radius_power(chain, theta)) / theta;
    }

    const auto h = markov_envelope_eigenvector(chain, theta);
    const auto pi = chain.stationary_distribution();
    double eh = 0.0;
    for (std::size_t i = 0; i < chain.n; ++i) eh += pi[i] * h[i];

    double hmin_under = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < chain.n; ++i)
        if (rho_slot > chain.rates[i]) hmin_under = std::min(hmin_under, h[i]);
    if (!std::isfinite(hmin_under))
        throw EnvelopeInapplicableError(
            "markov envelope: no state with rate below the envelope rate");

    MarkovEnvelope env;
    env.rate = rho_slot / chain.slot;
    env.profile = ExpProfile(eh / hmin_under, theta);
    return env;
}

}  // namespace aoinc
