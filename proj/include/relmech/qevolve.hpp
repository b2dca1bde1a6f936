#pragma once

#include <cstdint>

#include "relmech/quantum.hpp"

namespace relmech {

enum class Propagator {
    CrankNicolson,  // implicit midpoint; unitary up to solver tolerance
    Rk4,            // explicit; conditionally stable, for cross-checks
};

struct EvolveOptions {
    double dt = 1e-3;
    int steps = 1;
    HamiltonianMode mode = HamiltonianMode::Composed;
    Propagator propagator = Propagator::CrankNicolson;
    double solver_tol = 1e-10;  // relative residual target per implicit solve
    int solver_cap = 500;       // iteration cap before SolverDiverged
    // Warn (stderr) when a single step changes the squared norm by more.
    double norm_warn_threshold = 1e-8;
    bool check_spectral_radius = true;  // power-iteration dt sanity estimate
    std::uint64_t seed = 12345;         // seeds the power-iteration probe
    int record_every = 0;               // 0 = keep no intermediate norms
};

struct EvolveResult {
    Wavefunction psi;
    int total_steps = 0;
    int max_solver_iterations = 0;       // worst CGNR iteration count seen
    double max_norm_drift = 0.0;         // max |  |psi|^2 - |psi_0|^2  | over steps
    double spectral_radius = 0.0;        // power-iteration estimate (0 if skipped)
    int norm_warnings = 0;               // steps whose drift exceeded the threshold
    std::vector<double> recorded_norms;  // |psi|^2 every record_every steps
};

// Power-iteration estimate of the largest |eigenvalue| of H (a few dozen
// applications on a seeded random field).
double spectral_radius_estimate(const QuantumModel& model, HamiltonianMode mode,
                                int iterations = 30, std::uint64_t seed = 12345);

// One Crank-Nicolson step (1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi,
// solved matrix-free with CGNR (normal-equation conjugate gradient), warm-started
// from psi. Returns the iteration count.
int crank_nicolson_step(const QuantumModel& model, CField& psi, double dt, HamiltonianMode mode,
                        double tol, int cap);

// Classic fourth-order explicit step of d psi / dt = -i H psi / hbar.
void rk4_step(const QuantumModel& model, CField& psi, double dt, HamiltonianMode mode);

EvolveResult evolve(const QuantumModel& model, const Wavefunction& psi0,
                    const EvolveOptions& opts);

struct GroundStateResult {
    Wavefunction psi;
    double energy = 0.0;        // <psi|H psi> at the final iterate
    double energy_drift = 0.0;  // |energy - previous sweep energy| (convergence gauge)
    int steps = 0;
};

// Imaginary-time relaxation: repeated explicit steps of d psi/d tau = -H psi / hbar
// with renormalization, converging to the lowest eigenstate overlapped by psi0.
GroundStateResult imaginary_time_ground_state(const QuantumModel& model, const Wavefunction& psi0,
                                              double dtau, int steps,
                                              HamiltonianMode mode = HamiltonianMode::Composed);

struct EhrenfestReport {
    // Worst |d<x_jc>/dt - rhs| over the interior sampling window, for three
    // right-hand sides: the full one (canonical momentum plus the symmetrized
    // inverse-inertia coupling), the canonical momentum alone, and the plain
    // momentum alone.
    double residual_full = 0.0;
    double residual_canonical_only = 0.0;
    double residual_plain_momentum = 0.0;
    int window = 0;  // number of centered-difference samples examined
};

// Evolves psi0 for `steps` Crank-Nicolson steps of size dt and checks the
// position-expectation evolution identity for particle j, component k.
EhrenfestReport ehrenfest_check(const QuantumModel& model, const Wavefunction& psi0, double dt,
                                int steps, int j, int k, HamiltonianMode mode,
                                double solver_tol = 1e-12);

struct VelocityReport {
    double measured = 0.0;  // (<r_x>(T) - <r_x>(0)) / T
    double expected = 0.0;  // hbar k0 / m12
    double relative_error = 0.0;
};

// Free-packet drift of the relative-coordinate expectation (textbook limit).
VelocityReport packet_velocity_check(const QuantumModel& model, const Wavefunction& psi0,
                                     double k0, double dt, int steps, double solver_tol = 1e-11);

}  // namespace relmech
