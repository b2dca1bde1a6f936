#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "relmech/config.hpp"
#include "relmech/errors.hpp"

using namespace relmech;

namespace {

std::string error_text(const std::string& doc) {
    try {
        parse_config_text(doc);
    } catch (const SchemaError& e) {
        return e.what();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("minimal configs parse with defaults filled") {
    const ScenarioConfig c = parse_config_text(R"({"scenario":"classical_run"})");
    CHECK(c.scenario == ScenarioKind::ClassicalRun);
    CHECK(c.seed == 12345);
    CHECK(c.constants.G == 1.0);
    CHECK(c.constants.hbar == 1.0);
    CHECK(c.output.directory == ".");
    CHECK(c.output.trajectory_format == "csv");
    CHECK(c.classical.masses.size() == 2);
    CHECK(c.classical.dt == 1e-3);
    CHECK(c.classical.steps == 1000);
    CHECK(c.classical.potential == "gravity");

    const ScenarioConfig q = parse_config_text(R"({"scenario":"quantum_evolve"})");
    CHECK(q.quantum.n == 128);
    CHECK(q.quantum.half_width == 6.4);
    CHECK(q.quantum.machian_terms);
    CHECK(q.quantum.mode == "composed");
    CHECK(q.quantum.propagator == "crank_nicolson");
}

TEST_CASE("explicit values land in the right fields") {
    const ScenarioConfig c = parse_config_text(R"({
        "scenario": "quantum_evolve",
        "seed": 99,
        "constants": {"G": 2.0, "hbar": 0.5},
        "output": {"directory": "out", "prefix": "trial", "trajectory_format": "both"},
        "quantum": {"n": 64, "half_width": 3.2, "m1": 1.5, "m2": 2.5,
                     "background_inertia": 4.0, "machian_terms": false,
                     "potential": "harmonic", "spring_k": 0.7,
                     "cx": 0.4, "cy": -0.3, "sigma": 0.5, "kx": 1.0, "ky": -1.0,
                     "dt": 5e-4, "steps": 20, "mode": "truncated",
                     "propagator": "rk4", "solver_tol": 1e-8,
                     "record_every": 5, "snapshot_every": 10, "snapshot_final": false}
    })");
    CHECK(c.seed == 99);
    CHECK(c.constants.G == 2.0);
    CHECK(c.constants.hbar == 0.5);
    CHECK(c.output.prefix == "trial");
    CHECK(c.quantum.n == 64);
    CHECK(c.quantum.m2 == 2.5);
    CHECK_FALSE(c.quantum.machian_terms);
    CHECK(c.quantum.mode == "truncated");
    CHECK(c.quantum.propagator == "rk4");
    CHECK(c.quantum.record_every == 5);
    CHECK_FALSE(c.quantum.snapshot_final);
}

TEST_CASE("unknown keys are rejected with their full path") {
    const std::string top = error_text(R"({"scenario":"classical_run","foo":1})");
    CHECK(top.find("foo") != std::string::npos);
    CHECK(top.find("unknown key") != std::string::npos);

    const std::string nested =
        error_text(R"({"scenario":"quantum_evolve","quantum":{"sigma":0.5,"wobble":2}})");
    CHECK(nested.find("quantum.wobble") != std::string::npos);
    CHECK(nested.find("unknown key") != std::string::npos);
}

TEST_CASE("negative mass names the offending key") {
    const std::string msg = error_text(
        R"({"scenario":"classical_run","classical":{"masses":[1.0,-2.0],
            "positions":[[1,0,0],[-1,0,0]],"velocities":[[0,0,0],[0,0,0]]}})");
    CHECK(msg.find("classical.masses[1]") != std::string::npos);
    CHECK(msg.find("positive") != std::string::npos);
}

TEST_CASE("all violations are collected into one error") {
    const std::string msg = error_text(
        R"({"scenario":"quantum_evolve","quantum":{"n":8,"sigma":-1.0,"mode":"fancy"}})");
    CHECK(msg.find("and 2 more") != std::string::npos);
    CHECK(msg.find("n must be in [16, 16384]") != std::string::npos);
}

TEST_CASE("scenario key is required and validated") {
    CHECK(error_text(R"({})").find("required key is missing") != std::string::npos);
    const std::string bad = error_text(R"({"scenario":"warp_drive"})");
    CHECK(bad.find("scenario") != std::string::npos);
    CHECK_THROWS_AS(parse_config_text(R"({"scenario":"warp_drive"})"), SchemaError);
}

TEST_CASE("parameter blocks are only accepted by scenarios that use them") {
    const std::string a =
        error_text(R"({"scenario":"bucket_sweep","classical":{"dt":1e-3}})");
    CHECK(a.find("block not used by scenario bucket_sweep") != std::string::npos);

    const std::string b =
        error_text(R"({"scenario":"quantum_checks","quantum":{"n":32}})");
    CHECK(b.find("block not used by scenario quantum_checks") != std::string::npos);

    const std::string c =
        error_text(R"({"scenario":"invariant_suite","bucket":{"m":1.0}})");
    CHECK(c.find("block not used by scenario invariant_suite") != std::string::npos);

    CHECK_NOTHROW(parse_config_text(R"({"scenario":"gauge_check","classical":{"steps":10}})"));
    CHECK_NOTHROW(parse_config_text(R"({"scenario":"bucket_sim","bucket":{"n_shell":16}})"));
}

TEST_CASE("shell inertia accepts the string spellings of infinity") {
    const ScenarioConfig c = parse_config_text(
        R"({"scenario":"bucket_analytic","bucket":{"I0":"inf"}})");
    CHECK(std::isinf(c.bucket.I0));

    const ScenarioConfig s = parse_config_text(
        R"({"scenario":"bucket_sweep","bucket":{"I0_values":[10.0,"Infinity"]}})");
    REQUIRE(s.bucket.I0_values.size() == 2);
    CHECK(s.bucket.I0_values[0] == 10.0);
    CHECK(std::isinf(s.bucket.I0_values[1]));

    const std::string msg = error_text(
        R"({"scenario":"bucket_analytic","bucket":{"I0":"lots"}})");
    CHECK(msg.find("bucket.I0") != std::string::npos);
}

TEST_CASE("seed accepts the full unsigned range and rejects negatives") {
    const ScenarioConfig big = parse_config_text(
        R"({"scenario":"invariant_suite","seed":18446744073709551615})");
    CHECK(big.seed == 18446744073709551615ull);
    const std::string msg = error_text(R"({"scenario":"invariant_suite","seed":-4})");
    CHECK(msg.find("seed") != std::string::npos);
    CHECK(msg.find("non-negative") != std::string::npos);
}

TEST_CASE("malformed documents raise parse errors") {
    CHECK_THROWS_AS(parse_config_text("{\"scenario\":"), ParseError);
    CHECK_THROWS_AS(parse_config_text("[1,2,3]"), SchemaError);  // not an object
    CHECK_THROWS_AS(parse_config("/nonexistent/path/config.json"), ParseError);
    const std::string msg = error_text("{\"scenario\":");
    CHECK(msg.find("<config>") != std::string::npos);
}

TEST_CASE("range and type violations are caught") {
    CHECK(error_text(R"({"scenario":"quantum_evolve","quantum":{"solver_tol":0.0}})")
              .find("solver_tol") != std::string::npos);
    CHECK(error_text(R"({"scenario":"classical_run","output":{"trajectory_format":"xml"}})")
              .find("trajectory_format") != std::string::npos);
    CHECK(error_text(R"({"scenario":"classical_run","output":{"prefix":"a/b"}})")
              .find("must not contain '/'") != std::string::npos);
    CHECK(error_text(R"({"scenario":"classical_run","classical":{"steps":1.5}})")
              .find("expected an integer") != std::string::npos);
    CHECK(error_text(R"({"scenario":"bucket_sim","bucket":{"n_shell":2}})")
              .find("n_shell must be in [3, 1e5]") != std::string::npos);
    CHECK(error_text(R"({"scenario":"classical_run","constants":{"G":-1.0}})")
              .find("G must be positive") != std::string::npos);
}

TEST_CASE("body arrays must agree in length") {
    const std::string msg = error_text(
        R"({"scenario":"classical_run","classical":{
            "masses":[1.0,1.0,1.0],
            "positions":[[1,0,0],[-1,0,0]],
            "velocities":[[0,0,0],[0,0,0]]}})");
    CHECK(msg.find("classical.positions") != std::string::npos);
    CHECK(msg.find("3 entries") != std::string::npos);
}

TEST_CASE("position triples must have exactly three finite components") {
    CHECK(error_text(R"({"scenario":"classical_run","classical":{
              "masses":[1.0],"positions":[[1,2]],"velocities":[[0,0,0]]}})")
              .find("[x, y, z] triple") != std::string::npos);
    CHECK(error_text(R"({"scenario":"classical_run","classical":{
              "masses":[1.0],"positions":[[1,2,"a"]],"velocities":[[0,0,0]]}})")
              .find("positions") != std::string::npos);
}

TEST_CASE("files parse the same as inline text") {
    const char* path = "test_config_tmp.json";
    {
        std::ofstream f(path);
        f << R"({"scenario":"bucket_analytic","bucket":{"I0":50.0}})";
    }
    const ScenarioConfig c = parse_config(path);
    CHECK(c.scenario == ScenarioKind::BucketAnalytic);
    CHECK(c.bucket.I0 == 50.0);
    std::remove(path);
}

TEST_CASE("scenario kind names round-trip") {
    for (const char* name :
         {"classical_run", "gauge_check", "bucket_analytic", "bucket_sweep", "bucket_sim",
          "quantum_evolve", "quantum_checks", "invariant_suite"}) {
        CHECK(to_string(scenario_kind_from_string(name)) == name);
    }
    CHECK_THROWS_AS(scenario_kind_from_string("bogus"), SchemaError);
}
