// bounds.hpp - Closed-form age and delay tail bounds, bound curves with
// optimized theta parameters, quantile inversion, and the product rule for
// independent parallel subsystems.
#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "aoinc/envelopes.hpp"
#include "aoinc/stieltjes.hpp"

namespace aoinc {

struct ThetaTriple {
    double theta_A = std::numeric_limits<double>::quiet_NaN();
    double theta_S = std::numeric_limits<double>::quiet_NaN();
    double theta_T = std::numeric_limits<double>::quiet_NaN();
};

struct BoundEval {
    double probability = 1.0;
    ThetaTriple theta;
};

// General age bound for one subsystem:
//   P[age > x] <= 1 - [1-eps_A_up]+ * [1-eps_S]+ (rho_S x - l_max)
//              +  1 - [1-eps_A_low]+ * [1-eps_T]+ (x - l_max/rho_S')
// with eps_T(u) = eps_S'(rho_S' u). Requires rho_A <= rho_S (throws
// InfeasibleThetaError otherwise); returns 1 for x below the validity
// floor l_max / min(rho_S, rho_S'). The result is truncated to [0,1].
double age_bound_general(const EnvelopeSet& envelopes, double l_max, double x);

// Constant-rate specialization:
//   P[age > x] <= eps_A_up(r x - l_max) + eps_A_low(x - l_max/r)
// for rho_A <= r and x >= l_max/r (1 below the floor).
double age_bound_constant_rate(const UpperArrivalEnvelope& upper,
                               const LowerArrivalEnvelope& lower, double rate, double l_max,
                               double x);

// Periodic-arrival bound at arrival phase `phase` in [0, period):
//   eps_S(rho_S (x - [l/rho_S - phase]+) - l)
//   + eps_S'(rho_S' (x - (period - phase)) - l)
// The worst case is phase = 0. Requires l/period <= rho_S and
// x >= period + l/min(rho_S, rho_S') (1 below the floor).
double age_bound_periodic(const ServiceEnvelope& primary, const ServiceEnvelope& secondary,
                          double packet_length, double period, double x, double phase = 0.0);

// Virtual-delay bound: first term of the general age bound without the
// packetizer shift, 1 - [1-eps_A_up]+ * [1-eps_S]+ (rho_S x).
double delay_bound(const EnvelopeSet& envelopes, double x);

// ---------------------------------------------------------------------------
// Bound curves

// CCDF upper bound as a function of the age threshold x. Evaluation is lazy
// and re-optimizes free parameters at each x; results are truncated to
// [0,1] and non-increasing for x at or above the validity floor.
class BoundCurve {
  public:
    using Evaluator = std::function<BoundEval(double)>;

    BoundCurve(double validity_floor, Evaluator fn)
        : floor_(validity_floor), fn_(std::move(fn)) {}

    static BoundCurve from_function(double validity_floor, std::function<double(double)> f) {
        return BoundCurve(validity_floor,
                          [f = std::move(f)](double x) { return BoundEval{f(x), {}}; });
    }

    BoundEval eval_point(double x) const {
        BoundEval e = fn_(x);
        if (e.probability < 0.0) e.probability = 0.0;
        if (e.probability > 1.0) e.probability = 1.0;
        return e;
    }
    double eval(double x) const { return eval_point(x).probability; }
    double validity_floor() const { return floor_; }

  private:
    double floor_;
    Evaluator fn_;
};

// Product of the truncated per-subsystem bounds at x (independent
// subsystems: the parallel age CCDF is the product of the subsystem CCDFs).
double parallel_ccdf(const std::vector<BoundCurve>& per_subsystem, double x);

// The composed curve; its theta record is the first subsystem's.
BoundCurve parallel_ccdf_curve(std::vector<BoundCurve> per_subsystem);

// Smallest x at or above the validity floor with curve.eval(x) <= eps,
// located by exponential bracketing and bisection to 1e-6 absolute on x.
// Throws UnboundedQuantileError if the bound stays above eps up to x = 1e6.
double invert_quantile(const BoundCurve& curve, double eps);

}  // namespace aoinc
