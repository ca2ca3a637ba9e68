#include "aoinc/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoinc {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Equal-decay cases 1 and 3 in one expression:
//   ([alpha]_1 - alpha [ln alpha]_+ + alpha v x) e^{-v x}.
double equal_decay_value(double alpha, double v, double x) {
    const double lead = std::max(1.0, alpha) - alpha * std::max(0.0, std::log(alpha));
    return (lead + alpha * v * x) * std::exp(-v * x);
}

// Distinct-decay cases 2 and 4, written so the v1 -> v2 limit is reached
// without cancellation:
//   alpha <= 1:  e^{-v2 x} + alpha v2 e^{-v1 x} expm1((v1-v2) x) / (v1-v2)
//   alpha  > 1:  alpha e^{-v1 x} [1 + v1 expm1((v1-v2)(x - ln(alpha)/v1)) / (v1-v2)]
double distinct_decay_value(double alpha, double v1, double v2, double x) {
    const double dv = v1 - v2;
    if (alpha <= 1.0) {
        return std::exp(-v2 * x) + alpha * v2 * std::exp(-v1 * x) * std::expm1(dv * x) / dv;
    }
    const double xs = x - std::log(alpha) / v1;
    return alpha * std::exp(-v1 * x) * (1.0 + v1 * std::expm1(dv * xs) / dv);
}

}  // namespace

double stieltjes_domain_floor(double alpha, double v1) {
    return std::max(0.0, std::log(alpha)) / v1;
}

double stieltjes_exp_conv(double alpha, double v1, double v2, double x) {
    if (!(alpha > 0.0) || !(v1 > 0.0) || !(v2 > 0.0))
        throw ParameterDomainError("stieltjes convolution: alpha, v1, v2 must be positive");
    if (x < stieltjes_domain_floor(alpha, v1))
        throw std::domain_error("stieltjes convolution: x below the domain floor");
    if (std::fabs(v1 - v2) <= 1e-9 * std::max(v1, v2))
        return clamp01(equal_decay_value(alpha, 0.5 * (v1 + v2), x));
    return clamp01(distinct_decay_value(alpha, v1, v2, x));
}

double deviation_sum_tail(const std::optional<ExpProfile>& eps1,
                          const std::optional<ExpProfile>& eps2, double x) {
    if (x < 0.0) return 1.0;
    if (!eps1 && !eps2) return 0.0;
    if (!eps1) return clamp01(eps2->evaluate(x));
    if (!eps2) return clamp01(eps1->evaluate(x));
    if (eps2->prefactor != 1.0)
        throw ParameterDomainError("deviation_sum_tail: second profile must have unit prefactor");
    if (x < stieltjes_domain_floor(eps1->prefactor, eps1->decay)) return 1.0;
    const double a = eps1->prefactor, v1 = eps1->decay, v2 = eps2->decay;
    if (std::fabs(v1 - v2) <= 1e-9 * std::max(v1, v2))
        return clamp01(equal_decay_value(a, 0.5 * (v1 + v2), x));
    return clamp01(distinct_decay_value(a, v1, v2, x));
}

}  // namespace aoinc
