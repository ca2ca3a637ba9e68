#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aoinc/scenario.hpp"

using namespace aoinc;

namespace {

const char* kValid = R"({
  "schema_version": 1,
  "system": {
    "arrivals": {"kind": "poisson", "packet_length": 1.0, "mean_interarrival": 1.0},
    "splitting": {"policy": "random_weighted", "weights": [0.5, 0.5]},
    "subsystems": [
      {"service": {"kind": "poisson", "rate": 1.0}},
      {"service": {"kind": "markov_onoff", "p_on": 0.9, "beta_over_beta0": 2.0, "capacity": 1.2}}
    ]
  },
  "sweep": {"w_min": 0.6, "w_max": 4.0, "n_points": 5, "log_scale": true},
  "epsilon": 1e-6,
  "sim": {"n_packets": 100000, "seed": 3, "eps": 1e-3, "warmup_fraction": 0.1},
  "outputs": ["age_bound", "age_sim"]
})";

}  // namespace

TEST_CASE("valid scenario parses") {
    const auto s = parse_scenario(kValid);
    CHECK(s.schema_version == 1);
    CHECK(s.system.services.size() == 2);
    CHECK(s.system.external_arrivals.is_poisson());
    CHECK(s.sweep.has_value());
    CHECK(s.sweep->n_points == 5);
    CHECK(s.epsilon_bound == doctest::Approx(1e-6));
    CHECK(s.n_packets == 100000);
    CHECK(s.outputs.size() == 2);
    const auto pts = s.sweep_points();
    CHECK(pts.size() == 5);
    CHECK(pts.front() == doctest::Approx(0.6));
    CHECK(pts.back() == doctest::Approx(4.0));
    // on-off shorthand expands into a two-state chain
    const auto& mm = std::get<MarkovModulated>(s.system.services[1].kind);
    CHECK(mm.chain.n == 2);
    CHECK(mm.chain.rates[1] == doctest::Approx(1.2));
}

TEST_CASE("parse errors carry the field path") {
    SUBCASE("malformed JSON") {
        CHECK_THROWS_WITH_AS(parse_scenario("{"), doctest::Contains("JSON parse error"),
                             ScenarioError);
    }
    SUBCASE("missing subsystem list") {
        CHECK_THROWS_WITH_AS(
            parse_scenario(R"({"schema_version":1,"system":{"arrivals":{"kind":"poisson",
              "packet_length":1,"mean_interarrival":1}}})"),
            doctest::Contains("system.subsystems"), ScenarioError);
    }
    SUBCASE("unknown service kind names the field") {
        CHECK_THROWS_WITH_AS(
            parse_scenario(R"({"schema_version":1,"system":{
              "arrivals":{"kind":"poisson","packet_length":1,"mean_interarrival":1},
              "subsystems":[{"service":{"kind":"fancy"}}]}})"),
            doctest::Contains("subsystems[0].service.kind"), ScenarioError);
    }
    SUBCASE("wrong schema version") {
        CHECK_THROWS_WITH_AS(
            parse_scenario(R"({"schema_version":2,"system":{
              "arrivals":{"kind":"poisson","packet_length":1,"mean_interarrival":1},
              "subsystems":[{"service":{"kind":"poisson","rate":1}}]}})"),
            doctest::Contains("schema_version"), ScenarioError);
    }
    SUBCASE("weights not summing to one") {
        CHECK_THROWS_AS(
            parse_scenario(R"({"schema_version":1,"system":{
              "arrivals":{"kind":"poisson","packet_length":1,"mean_interarrival":1},
              "splitting":{"policy":"random_weighted","weights":[0.5,0.2]},
              "subsystems":[{"service":{"kind":"poisson","rate":1}},
                            {"service":{"kind":"poisson","rate":1}}]}})"),
            ScenarioError);
    }
}

TEST_CASE("dump and reparse round-trips the scenario") {
    const auto s = parse_scenario(kValid);
    const auto text = dump_scenario(s);
    const auto s2 = parse_scenario(text);
    CHECK(s2.system.services.size() == s.system.services.size());
    CHECK(s2.sweep->w_min == doctest::Approx(s.sweep->w_min));
    CHECK(s2.sweep->w_max == doctest::Approx(s.sweep->w_max));
    CHECK(s2.sweep->n_points == s.sweep->n_points);
    CHECK(s2.epsilon_bound == doctest::Approx(s.epsilon_bound));
    CHECK(s2.n_packets == s.n_packets);
    CHECK(s2.seed == s.seed);
    CHECK(s2.outputs == s.outputs);
    const auto& mm = std::get<MarkovModulated>(s2.system.services[1].kind);
    const auto& mm1 = std::get<MarkovModulated>(s.system.services[1].kind);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(mm.chain.transition[i] == doctest::Approx(mm1.chain.transition[i]).epsilon(1e-15));
    // normalized text is a fixed point
    CHECK(dump_scenario(s2) == text);
}

TEST_CASE("periodic arrivals and round robin parse") {
    const auto s = parse_scenario(R"({"schema_version":1,"system":{
        "arrivals":{"kind":"periodic","packet_length":1,"period":2.0},
        "splitting":{"policy":"round_robin"},
        "subsystems":[{"service":{"kind":"poisson","rate":1}},
                      {"service":{"kind":"poisson","rate":1}}]}})");
    CHECK(s.system.external_arrivals.is_periodic());
    CHECK(s.system.has_analytic_path());
    const auto arrs = s.system.derive_subsystem_arrivals();
    CHECK(arrs[0].mean_interarrival() == doctest::Approx(4.0));
    CHECK(std::get<PeriodicArrivals>(arrs[1].kind).offset == doctest::Approx(2.0));
}
