#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

#include "kdiff/config.hpp"
#include "kdiff/errors.hpp"

using namespace kdiff;

TEST_CASE("minimal config resolves to the documented defaults") {
    const auto c = parse_config("scenario = quantum_measured\n");
    CHECK(c.scenario == Scenario::quantum_measured);
    CHECK(c.system.h0 == "rotator");
    CHECK(c.system.inertia == 1.0);
    CHECK(c.system.potential == "cosine");
    CHECK(c.system.lambda == 1.0);
    CHECK(c.system.period == 1.0);
    CHECK(c.system.tau == 0.5);
    CHECK(c.system.hbar == 1.0);
    CHECK(c.system.basis_m == 256);
    CHECK(c.run.kicks == 200);
    CHECK(c.run.seed == 12345);
    CHECK(c.output.dir == "out");
}

TEST_CASE("the unitary model check defaults to a small instance") {
    const auto c = parse_config("scenario = unitary_model_check\n");
    CHECK(c.system.basis_m == 16);
    CHECK(c.run.kicks == 3);
}

TEST_CASE("misspelled keys are cited with their line") {
    const std::string text = "scenario = quantum_measured\n[system]\nlamda = 2.0\n";
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("lamda"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(text), doctest::Contains("line 3"), ConfigError);
}

TEST_CASE("unknown sections, types and ranges are rejected") {
    CHECK_THROWS_WITH_AS(parse_config("[sistem]\nlambda = 1\n"), doctest::Contains("sistem"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[system]\nlambda = abc\n"),
                         doctest::Contains("expected a number"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[system]\ntau = 1.5\n"), doctest::Contains("tau"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[system]\nbasis_m = 64\ngrid_g = 100\n"),
                         doctest::Contains("257"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\nkicks = 0\n"), doctest::Contains("kicks"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("scenario = warp_drive\n"), doctest::Contains("warp_drive"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[output]\nformats = json\n"), doctest::Contains("csv"),
                         ConfigError);
}

TEST_CASE("harmonics and coefficient lists parse") {
    const std::string text =
        "scenario = classical_randomized\n"
        "[system]\n"
        "potential = cosine_sum\n"
        "harmonics = 1:1.0, 2:0.5\n"
        "h0 = polynomial\n"
        "coefficients = 0, 0, 0.5\n";
    const auto c = parse_config(text);
    REQUIRE(c.system.harmonics.size() == 2);
    CHECK(c.system.harmonics[0].k == 1);
    CHECK(c.system.harmonics[1].weight == 0.5);
    REQUIRE(c.system.coefficients.size() == 3);
    CHECK(c.system.coefficients[2] == 0.5);
    // materializes into domain objects
    const auto params = c.system.to_params();
    CHECK(params.v.max_harmonic() == 2);
}

TEST_CASE("scenario defaults apply first, explicit keys override them") {
    // 'scenario' is a top-level key; inside a section it is rejected
    CHECK_THROWS_AS(parse_config("[run]\nscenario = full_table\n"), ConfigError);

    const auto c = parse_config("scenario = unitary_model_check\n"
                                "[system]\nbasis_m = 32\n");
    CHECK(c.scenario == Scenario::unitary_model_check);
    CHECK(c.system.basis_m == 32); // explicit value beats the scenario default
    CHECK(c.run.kicks == 3);       // untouched scenario default survives
}

TEST_CASE("comments and blank lines are ignored") {
    const std::string text =
        "# top comment\n"
        "scenario = classical_twist\n"
        "\n"
        "[system]  # trailing comment\n"
        "lambda = 2.5   # kick strength\n";
    const auto c = parse_config(text);
    CHECK(c.scenario == Scenario::classical_twist);
    CHECK(c.system.lambda == 2.5);
}

TEST_CASE("config echo round-trips to an equivalent config") {
    const std::string text =
        "scenario = full_table\n"
        "[system]\n"
        "lambda = 2.25\n"
        "tau = 0.125\n"
        "basis_m = 32\n"
        "potential = cosine_sum\n"
        "harmonics = 1:0.75, 3:0.2\n"
        "[run]\n"
        "kicks = 55\n"
        "seed = 987654321\n"
        "ensemble = 2000\n"
        "[output]\n"
        "dir = somewhere\n"
        "dump_w = true\n";
    const auto a = parse_config(text);
    const auto b = parse_config(write_config(a));
    CHECK(a.scenario == b.scenario);
    CHECK(a.system.lambda == b.system.lambda);
    CHECK(a.system.tau == b.system.tau);
    CHECK(a.system.basis_m == b.system.basis_m);
    CHECK(a.system.potential == b.system.potential);
    REQUIRE(a.system.harmonics.size() == b.system.harmonics.size());
    CHECK(a.system.harmonics[1].weight == b.system.harmonics[1].weight);
    CHECK(a.run.kicks == b.run.kicks);
    CHECK(a.run.seed == b.run.seed);
    CHECK(a.run.ensemble == b.run.ensemble);
    CHECK(a.output.dir == b.output.dir);
    CHECK(a.output.dump_w == b.output.dump_w);
    // and the echo is a fixed point
    CHECK(write_config(a) == write_config(b));
}

TEST_CASE("scenario names round-trip") {
    for (auto s : {Scenario::classical_twist, Scenario::quantum_coherent,
                   Scenario::quantum_measured, Scenario::classical_randomized,
                   Scenario::unitary_model_check, Scenario::full_table})
        CHECK(scenario_from_name(scenario_name(s)) == s);
}
