#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "aoinc/analyzer.hpp"
#include "aoinc/markov.hpp"
#include "aoinc/rng.hpp"

using namespace aoinc;

namespace {

// Scripted closed-form bound for Poisson arrivals on a constant-rate link:
// e^{-theta (r x - l)} + e^{-(x - l/r)/w} minimized over feasible theta by
// golden section (the bound is monotone in theta, so the optimum sits at the
// feasibility boundary e^{theta l} - 1 <= theta w r).
double md1_bound_oracle(double l, double w, double r, double x) {
    auto rho_a = [&](double th) { return (std::exp(th * l) - 1.0) / (th * w); };
    double lo = 1e-4, hi = 1e2;
    if (rho_a(lo) > r) return 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        (rho_a(mid) <= r ? lo : hi) = mid;
    }
    auto f = [&](double th) {
        return std::min(1.0, std::exp(-th * (r * x - l)) + std::exp(-(x - l / r) / w));
    };
    // golden section over the feasible range
    const double phi = 0.6180339887498949;
    double a = 1e-4, b = lo;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < 200; ++i) {
        if (f1 <= f2) {
            b = x2; x2 = x1; f2 = f1; x1 = b - phi * (b - a); f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2; x2 = a + phi * (b - a); f2 = f(x2);
        }
    }
    return std::min(f1, f2);
}

double md1_quantile_oracle(double l, double w, double r, double eps) {
    double lo = l / r, hi = 1.0;
    while (md1_bound_oracle(l, w, r, hi) > eps) {
        hi *= 2.0;
        REQUIRE(hi < 1e7);
    }
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (md1_bound_oracle(l, w, r, mid) <= eps ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("optimizer matches the scripted constant-rate oracle") {
    ArrivalModel arr{PoissonPackets{1.0, 1.0}};
    ServiceModel svc{ConstantRate{2.0}, 1.0};
    for (double x : {2.0, 4.0, 8.0}) {
        const auto opt = optimize_theta(arr, svc, x);
        CHECK(opt.bound == doctest::Approx(md1_bound_oracle(1.0, 1.0, 2.0, x)).epsilon(1e-6));
        CHECK(std::isnan(opt.theta.theta_S));  // no free service parameter
    }
}

TEST_CASE("optimizer rejects unstable systems") {
    ArrivalModel arr{PoissonPackets{1.0, 0.4}};  // mean rate 2.5
    ServiceModel svc{PoissonService{2.0}, 1.0};
    CHECK_THROWS_AS(optimize_theta(arr, svc, 5.0), InfeasibleSystemError);
}

TEST_CASE("optimized bound dominates random feasible theta tuples") {
    const double l = 1.0, w = 1.0, r = 2.0, x = 8.0;
    ArrivalModel arr{PoissonPackets{l, w}};
    ServiceModel svc{PoissonService{r}, l};
    const auto opt = optimize_theta(arr, svc, x);

    Xoshiro256pp rng(123, 9);
    int tried = 0;
    while (tried < 100) {
        const double th_a = 1e-3 * std::pow(1e4, rng.uniform01());
        const double th_s = 1e-3 * std::pow(1e4, rng.uniform01());
        const double th_t = 1e-3 * std::pow(1e4, rng.uniform01());
        EnvelopeSet env;
        env.upper_arrival =
            UpperArrivalEnvelope{poisson_arrival_rate(l, w, th_a), ExpProfile(1.0, th_a)};
        env.lower_arrival = LowerArrivalEnvelope{l, ExpProfile(1.0, 1.0 / w)};
        env.service_primary = service_envelope(svc, th_s);
        env.service_secondary = service_envelope(svc, th_t);
        if (env.upper_arrival->rate > env.service_primary.rate) continue;  // infeasible draw
        ++tried;
        CHECK(opt.bound <= age_bound_general(env, l, x) + 1e-9);
    }
}

TEST_CASE("constant-rate path degenerates the general bound to the same value") {
    // With identically-zero service profiles the general bound collapses to
    // the constant-rate recipe; the dedicated path must match it.
    const double l = 1.0, w = 1.0, r = 2.0, x = 6.0;
    ArrivalModel arr{PoissonPackets{l, w}};
    const auto cor2 = optimize_theta(arr, ServiceModel{ConstantRate{r}, l}, x);
    EnvelopeSet env;
    env.upper_arrival = UpperArrivalEnvelope{poisson_arrival_rate(l, w, cor2.theta.theta_A),
                                             ExpProfile(1.0, cor2.theta.theta_A)};
    env.lower_arrival = LowerArrivalEnvelope{l, ExpProfile(1.0, 1.0 / w)};
    env.service_primary = ServiceEnvelope{r, std::nullopt};
    env.service_secondary = ServiceEnvelope{r, std::nullopt};
    CHECK(cor2.bound == doctest::Approx(age_bound_general(env, l, x)).epsilon(1e-12));
}

TEST_CASE("quantile inversion matches the scripted oracle for the closed recipe") {
    ArrivalModel arr{PoissonPackets{1.0, 1.0}};
    ServiceModel svc{ConstantRate{2.0}, 1.0};
    SubsystemAnalyzer an(arr, svc);
    const double got = invert_quantile(an.age_curve(), 1e-6);
    CHECK(got == doctest::Approx(md1_quantile_oracle(1.0, 1.0, 2.0, 1e-6)).epsilon(1e-5));
}

TEST_CASE("product-rule quantile algebra: eps^(1/k) identity") {
    ArrivalModel arr{PoissonPackets{1.0, 2.0}};
    ServiceModel svc{PoissonService{1.0}, 1.0};
    SubsystemAnalyzer an(arr, svc);
    for (int k : {2, 4}) {
        std::vector<BoundCurve> curves(k, an.age_curve());
        const auto composed = parallel_ccdf_curve(std::move(curves));
        for (double eps : {1e-6, 1e-9}) {
            const double via_product = invert_quantile(composed, eps);
            const double via_root = invert_quantile(an.age_curve(), std::pow(eps, 1.0 / k));
            CHECK(via_product == doctest::Approx(via_root).epsilon(1e-9));
        }
    }
}

TEST_CASE("log bound is asymptotically affine in x") {
    ArrivalModel arr{PoissonPackets{1.0, 1.0}};
    ServiceModel svc{PoissonService{2.0}, 1.0};
    SubsystemAnalyzer an(arr, svc);
    const auto curve = an.age_curve();
    const double x_lo = 2.0 * invert_quantile(curve, 1e-3);
    const double x_hi = invert_quantile(curve, 1e-9);
    REQUIRE(x_hi > x_lo);

    // straight-line fit of ln(bound) on [x_lo, x_hi]
    int n = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double x = x_lo; x <= x_hi; x += (x_hi - x_lo) / 24.0) {
        const double y = std::log(curve.eval(x));
        sx += x; sy += y; sxx += x * x; sxy += x * y; ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    const auto theta = curve.eval_point(x_hi).theta;
    const double rho_s = poisson_service_rate(2.0, theta.theta_S);
    const double rho_t = poisson_service_rate(2.0, theta.theta_T);
    const double decay1 = std::min(theta.theta_A, theta.theta_S) * rho_s;
    const double decay2 = std::min(1.0, theta.theta_T * rho_t);  // 1/w = 1
    const double expected = -std::min(decay1, decay2);
    CHECK(slope == doctest::Approx(expected).epsilon(0.02));
}
