#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "bec/scenario.hpp"

using namespace bec;

namespace {

const std::string kModel = R"({
  "boundary": "dirichlet",
  "n_pixels": 8,
  "box_length_um": 4.0,
  "atom_count": 480.0,
  "temperature_nK": 30.0,
  "healing_length_um": 0.25
})";

std::string wrap(const std::string& extra) {
    return "{\"model\": " + kModel + (extra.empty() ? "" : ", " + extra) + "}";
}

}  // namespace

TEST_CASE("model parsing and unit conversion") {
    const auto s = scenario_from_json(wrap(""));
    const auto& p = s.model.params;
    CHECK(p.n_pixels == 8);
    CHECK(p.box_length == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(p.mean_density == doctest::Approx(120.0).epsilon(1e-12));
    CHECK(p.boundary == Boundary::Dirichlet);
    CHECK(p.zero_mode_mu == 0.0);
    CHECK(p.mass == 1.0);
    // g reproduces the requested healing length
    CHECK(healing_length(p) == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(s.model.units.temperature_to_nK(s.model.temperature) ==
          doctest::Approx(30.0).epsilon(1e-10));
    CHECK_FALSE(s.protocol.has_value());
    CHECK_FALSE(s.cycle.has_value());
    CHECK(s.run.gap_tol == 1e-8);
}

TEST_CASE("pixel size alternative and neumann default") {
    const std::string text = R"({"model": {
      "boundary": "neumann",
      "pixel_size_um": 0.5,
      "box_length_um": 4.0,
      "atom_count": 480.0,
      "temperature_nK": 30.0,
      "healing_length_um": 0.25
    }})";
    const auto s = scenario_from_json(text);
    CHECK(s.model.params.n_pixels == 8);
    CHECK(s.model.params.boundary == Boundary::Neumann);
    // default zero-mode regularizer is 1e-6 of the phi-block scale
    CHECK(s.model.params.zero_mode_mu ==
          doctest::Approx(1e-6 * s.model.params.phi_prefactor()).epsilon(1e-10));
}

TEST_CASE("schema violations carry the offending path") {
    CHECK_THROWS_AS(scenario_from_json("not json"), ScenarioError);
    CHECK_THROWS_AS(scenario_from_json("[1,2]"), ScenarioError);
    CHECK_THROWS_WITH_AS(scenario_from_json(R"({"model": {}, "bogus": 1})"),
                         doctest::Contains("$.bogus"), ScenarioError);
    // unknown nested key
    const std::string bad_model = R"({"model": {
      "boundary": "dirichlet", "n_pixels": 8, "box_length_um": 4.0,
      "atom_count": 480.0, "temperature_nK": 30.0,
      "healing_length_um": 0.25, "typo_key": 3
    }})";
    CHECK_THROWS_WITH_AS(scenario_from_json(bad_model),
                         doctest::Contains("model.typo_key"), ScenarioError);
    // missing required key
    CHECK_THROWS_WITH_AS(scenario_from_json(R"({"model": {"boundary": "dirichlet"}})"),
                         doctest::Contains("model."), ScenarioError);
    // both n_pixels and pixel_size_um
    const std::string both = R"({"model": {
      "boundary": "dirichlet", "n_pixels": 8, "pixel_size_um": 0.5,
      "box_length_um": 4.0, "atom_count": 480.0, "temperature_nK": 30.0,
      "healing_length_um": 0.25
    }})";
    CHECK_THROWS_AS(scenario_from_json(both), ScenarioError);
    // bad boundary name
    const std::string badbc = R"({"model": {
      "boundary": "periodic", "n_pixels": 8, "box_length_um": 4.0,
      "atom_count": 480.0, "temperature_nK": 30.0, "healing_length_um": 0.25
    }})";
    CHECK_THROWS_WITH_AS(scenario_from_json(badbc),
                         doctest::Contains("model.boundary"), ScenarioError);
}

TEST_CASE("protocol and run sections") {
    const auto s = scenario_from_json(wrap(R"("protocol": {
      "length_ratio_final": 0.9, "total_time_s": 0.13,
      "n_steps": 1000, "snapshot_every": 50
    }, "run": {"output_dir": "/tmp/x", "gap_tol": 1e-7, "snapshot_every": 5})"));
    REQUIRE(s.protocol.has_value());
    CHECK(s.protocol->length_ratio_final == 0.9);
    CHECK(s.protocol->n_steps == 1000);
    CHECK(s.model.units.time_to_s(s.protocol->total_time) ==
          doctest::Approx(0.13).epsilon(1e-12));
    CHECK(s.protocol_snapshot_every == 50);
    CHECK(s.run.output_dir == "/tmp/x");
    CHECK(s.run.gap_tol == 1e-7);
    CHECK(s.run.feas_tol == 1e-8);

    CHECK_THROWS_WITH_AS(
        scenario_from_json(wrap(R"("protocol": {"length_ratio_final": 0.9,
          "total_time_s": 0.1, "n_steps": 10, "oops": 1})")),
        doctest::Contains("protocol.oops"), ScenarioError);
}

TEST_CASE("cycle section") {
    const auto s = scenario_from_json(wrap(R"("cycle": {
      "ratio": 0.9, "t_comp_s": 0.05, "n_steps": 200,
      "T_hot_nK": 60.0, "T_cold_nK": 30.0,
      "gamma_per_s": 10.0, "t_bath_s": 0.5
    })"));
    REQUIRE(s.cycle.has_value());
    const auto& c = *s.cycle;
    CHECK(c.compression.length_ratio_final == 0.9);
    CHECK(c.expansion.length_ratio_final == doctest::Approx(1.0 / 0.9).epsilon(1e-12));
    CHECK(s.model.units.temperature_to_nK(c.hot_bath.temperature) ==
          doctest::Approx(60.0).epsilon(1e-10));
    CHECK(s.model.units.temperature_to_nK(c.cold_bath.temperature) ==
          doctest::Approx(30.0).epsilon(1e-10));
    // rate * time is dimensionless and unit-invariant
    CHECK(c.hot_bath.coupling_gamma * s.model.units.time_from_s(1.0) ==
          doctest::Approx(10.0).epsilon(1e-10));
    CHECK(s.model.units.time_to_s(c.bath_stroke_time) ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.bath_substeps == 50);
}
