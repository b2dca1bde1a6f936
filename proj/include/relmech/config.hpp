#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "relmech/system.hpp"

namespace relmech {

// The eight scenario kinds the command-line harness can dispatch.
enum class ScenarioKind {
    ClassicalRun,
    GaugeCheck,
    BucketAnalytic,
    BucketSweep,
    BucketSim,
    QuantumEvolve,
    QuantumChecks,
    InvariantSuite,
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& name);  // throws SchemaError

struct ConstantsBlock {
    double G = 1.0;
    double hbar = 1.0;
};

struct OutputBlock {
    std::string directory = ".";
    std::string prefix;                     // optional file-name prefix ("p" -> "p_...")
    std::string trajectory_format = "csv";  // csv | jsonl | both
};

// classical_run / gauge_check parameters. The default state is a circular
// two-body orbit (unit masses, separation 2, G = 1).
struct ClassicalBlock {
    std::vector<double> masses{1.0, 1.0};
    std::vector<Vec3> positions{Vec3(1, 0, 0), Vec3(-1, 0, 0)};
    std::vector<Vec3> velocities{Vec3(0, 0.5, 0), Vec3(0, -0.5, 0)};
    std::string potential = "gravity";  // gravity | harmonic | none
    double spring_k = 1.0;
    double dt = 1e-3;
    int steps = 1000;
    int sample_every = 10;
    // gauge_check only: battery sizes and the finite-path scale
    int gauge_paths = 20;
    int gauge_trajectories = 5;
    double gauge_scale = 0.5;
};

// bucket_analytic / bucket_sweep / bucket_sim parameters.
struct BucketBlock {
    double m = 1.0;
    double R = 1.0;
    double I0 = 100.0;
    std::vector<double> I0_values{10.0, 100.0,
                                  std::numeric_limits<double>::infinity()};  // sweep points
    int n_shell = 64;
    double R_s = 100.0;
    double dt = 2e-3;
    int steps = 31416;
    bool ring_gravity = true;
    int record_every = 100;
};

// quantum_evolve parameters (grid, packet, stepping).
struct QuantumBlock {
    int n = 128;
    double half_width = 6.4;
    double m1 = 1.0;
    double m2 = 1.0;
    double background_inertia = 0.0;
    double eps_soft = -1.0;  // negative selects the built-in softening scale
    bool machian_terms = true;
    std::string potential = "none";  // none | harmonic | gravity
    double spring_k = 1.0;
    double cx = 0.0, cy = 0.0, sigma = 0.9, kx = 0.0, ky = 0.0;
    double dt = 1e-3;
    int steps = 100;
    std::string mode = "composed";              // composed | truncated
    std::string propagator = "crank_nicolson";  // crank_nicolson | rk4
    double solver_tol = 1e-10;
    int record_every = 1;    // expectation-row stride (0 = endpoints only)
    int snapshot_every = 0;  // periodic wavefunction snapshots (0 = none)
    bool snapshot_final = true;
};

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::InvariantSuite;
    std::uint64_t seed = 12345;
    ConstantsBlock constants;
    OutputBlock output;
    ClassicalBlock classical;
    BucketBlock bucket;
    QuantumBlock quantum;
};

// Parses and validates a scenario file (JSON). Collects every schema
// violation before throwing, so the error message lists them all.
//   ParseError  - unreadable file or malformed JSON
//   SchemaError - unknown keys, wrong types, out-of-range values,
//                 blocks that the chosen scenario does not accept
ScenarioConfig parse_config(const std::string& path);

// Same, from an in-memory document (origin only labels error messages).
ScenarioConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

}  // namespace relmech
