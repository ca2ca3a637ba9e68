#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "aoinc/markov.hpp"

using namespace aoinc;

TEST_CASE("chain validation") {
    MarkovChannelSpec c;
    c.n = 2;
    c.transition = {0.5, 0.5, 0.2, 0.8};
    c.rates = {0.0, 1.0};
    c.slot = 1.0;
    CHECK_NOTHROW(c.validate());

    SUBCASE("row sum off by more than 1e-12") {
        c.transition[0] = 0.5 + 1e-9;
        CHECK_THROWS_AS(c.validate(), ParameterDomainError);
    }
    SUBCASE("negative probability") {
        c.transition = {1.2, -0.2, 0.2, 0.8};
        CHECK_THROWS_AS(c.validate(), ParameterDomainError);
    }
    SUBCASE("all-zero rates") {
        c.rates = {0.0, 0.0};
        CHECK_THROWS_AS(c.validate(), ParameterDomainError);
    }
    SUBCASE("reducible chain") {
        c.transition = {1.0, 0.0, 0.2, 0.8};
        CHECK_THROWS_AS(c.validate(), ParameterDomainError);
    }
}

TEST_CASE("stationary distribution") {
    const auto c = onoff_transition({0.9, 2.0 / 0.09, 1.0});
    const auto pi = c.stationary_distribution();
    CHECK(pi[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(0.9).epsilon(1e-12));

    MarkovChannelSpec ring;
    ring.n = 3;
    ring.transition = {0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0};
    ring.rates = {1.0, 2.0, 3.0};
    ring.slot = 1.0;
    const auto pr = ring.stationary_distribution();
    for (double v : pr) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(ring.mean_rate() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("two-state closed form vs power iteration across the parameter grid") {
    for (double p_on : {0.5, 0.9, 0.95}) {
        for (double bf : {1.0, 2.0, 3.0}) {
            const auto c = onoff_transition({p_on, bf / (p_on * (1.0 - p_on)), 2.0});
            for (double th = 1e-3; th <= 10.0; th *= 2.1544346900318838) {
                const double closed = markov_spectral_radius(c, th);
                const double power = markov_spectral_radius_power(c, th);
                CHECK(closed == doctest::Approx(power).epsilon(1e-10));
                const double rho_closed = -std::log(closed) / th;
                const double rho_power = -std::log(power) / th;
                CHECK(rho_closed == doctest::Approx(rho_power).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("spec example: closed form at p_on=0.9, beta=2beta0, c=2, theta=0.1") {
    const auto c = onoff_transition({0.9, 2.0 / 0.09, 2.0});
    const double sp = markov_spectral_radius(c, 0.1);
    CHECK(sp == doctest::Approx(markov_spectral_radius_power(c, 0.1)).epsilon(1e-10));
    const auto env = markov_service_envelope(c, 0.1);
    CHECK(env.rate == doctest::Approx(-std::log(sp) / 0.1).epsilon(1e-12));
}

TEST_CASE("three-state chain: power iteration path and envelope structure") {
    MarkovChannelSpec c;
    c.n = 3;
    c.transition = {0.6, 0.3, 0.1, 0.2, 0.6, 0.2, 0.1, 0.3, 0.6};
    c.rates = {0.0, 1.0, 3.0};
    c.slot = 1.0;
    c.validate();
    const auto pi = c.stationary_distribution();
    double mean = 0.0;
    for (std::size_t i = 0; i < 3; ++i) mean += pi[i] * c.rates[i];

    const auto env_small = markov_service_envelope(c, 1e-10);
    CHECK(env_small.rate == doctest::Approx(mean).epsilon(1e-9));

    const auto env = markov_service_envelope(c, 0.4);
    CHECK(env.rate < mean);
    CHECK(env.rate > 0.0);
    CHECK(env.profile.decay == doctest::Approx(0.4));
    // eigenvector residual of the normalized h
    const auto h = markov_envelope_eigenvector(c, 0.4);
    const double lambda = markov_spectral_radius(c, 0.4);
    for (std::size_t i = 0; i < 3; ++i) {
        double mh = 0.0;
        for (std::size_t j = 0; j < 3; ++j) mh += c.p(i, j) * std::exp(-0.4 * c.rates[j]) * h[j];
        CHECK(mh == doctest::Approx(lambda * h[i]).epsilon(1e-9));
    }
}

TEST_CASE("slot duration scales the envelope rate") {
    auto c = onoff_transition({0.9, 2.0 / 0.09, 2.0});
    const auto unit = markov_service_envelope(c, 0.2);
    c.slot = 0.5;
    const auto half = markov_service_envelope(c, 0.2);
    CHECK(half.rate == doctest::Approx(2.0 * unit.rate).epsilon(1e-12));
}
