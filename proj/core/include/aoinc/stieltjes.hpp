// stieltjes.hpp - Closed-form Stieltjes convolution of exponential deviation
// profiles: 1 - [1 - alpha e^{-v1 .}]_+ * (1 - e^{-v2 .}) evaluated at x.
#pragma once

#include <optional>

#include "aoinc/profile.hpp"

namespace aoinc {

// Domain floor [ln alpha]_+ / v1 below which the convolution is undefined.
double stieltjes_domain_floor(double alpha, double v1);

// Closed-form value, dispatching on (alpha <= 1 vs alpha > 1) and
// (v1 == v2 within 1e-9 relative vs distinct). The result is truncated to
// [0,1]. Throws std::domain_error for x below the domain floor; callers in
// bound evaluators treat that region as probability 1.
double stieltjes_exp_conv(double alpha, double v1, double v2, double x);

// Same value without the throw: x below the floor yields 1. Optional
// profiles denote identically-zero deviation profiles (deterministic
// components): with eps1 absent the result is eps2(x) and vice versa; with
// both absent it is 0. eps2 must have prefactor 1 when both are present
// (the convolution is commutative, so the caller puts any non-unit
// prefactor in eps1).
double deviation_sum_tail(const std::optional<ExpProfile>& eps1,
                          const std::optional<ExpProfile>& eps2, double x);

}  // namespace aoinc
