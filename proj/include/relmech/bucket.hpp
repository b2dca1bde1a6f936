#pragma once

#include <vector>

#include "relmech/dynamics.hpp"
#include "relmech/errors.hpp"

namespace relmech {

// Two equal point masses m on a circular orbit of radius R about their
// common center, surrounded by a distant massive shell whose isotropic
// moment of inertia I0 supplies the system's rotational inertia.
struct BucketConfig {
    double m = 1.0;
    double R = 1.0;
    double G = 1.0;
    double I0 = 100.0;
    bool I0_infinite = false;  // explicit flag; never encode "infinite" as a big float

    void validate() const;
    // Newtonian circular-orbit frequency sqrt(G m / 4 R^3) of the bare binary.
    double kepler_frequency() const;
};

struct BucketBalance {
    double Omega_b = 0.0;  // binary orbital frequency relative to the shell
    double Omega = 0.0;    // rotation rate of the local standard of non-rotation
    // False when the shell carries no inertia (I0 = 0): the centrifugal
    // support vanishes and no finite co-orbit frequency balances gravity.
    bool finite_equilibrium = true;
};

// Force balance of the shell-dressed binary.
//   Omega_b = (1 + 2 m R^2 / I0) * sqrt(G m / 4 R^3)
//   Omega   = Omega_b * I0 / (I0 + 2 m R^2)
// I0 infinite -> both reduce to the Newtonian frequency. I0 = 0 -> no
// finite equilibrium (Omega_b unbounded); reported via the flag, not an error.
BucketBalance bucket_balance(const BucketConfig& cfg);

// Effective gravitational coupling seen by the binary:
//   G_eff = G * (1 + 2 m R^2 / I0)^2
// Requires I0 > 0 (or the infinite flag, which gives plain G).
double g_eff(const BucketConfig& cfg);

struct BucketSweepRow {
    double I0 = 0.0;
    double Omega_b = 0.0;
    double Omega = 0.0;
    double G_eff = 0.0;
};

// One row per I0 value; Omega_b and G_eff decrease monotonically toward the
// Newtonian values as I0 grows.
std::vector<BucketSweepRow> bucket_sweep(const BucketConfig& base,
                                         const std::vector<double>& I0_values);

// Dynamic cross-check: the shell is realized as a rigid planar ring of
// n_shell equal point masses at radius R_s with total moment of inertia I0
// about the z axis.  The ring counter-rotates at the rate that cancels the
// binary's angular momentum (total J = 0), and its particles move on
// prescribed circles (rigid idealization).  The binary is integrated with
// RK4 in the field of its partner plus (toggleably) the ring.
struct RingSimConfig {
    int n_shell = 64;
    double R_s = 100.0;
    double dt = 2e-3;
    int steps = 31416;                  // ~5 binary periods at the default setup
    bool ring_gravity_on_binary = true; // recorded approximation, toggleable
    int record_every = 1;               // trajectory decimation for output
};

struct BucketSimResult {
    double measured_relative_frequency = 0.0;  // binary rate minus ring rate
    double binary_frequency = 0.0;             // fitted binary orbital rate
    double ring_frequency = 0.0;               // prescribed (constant) ring rate
    double predicted = 0.0;                    // closed-form Omega_b
    double relative_error = 0.0;               // |measured - predicted| / predicted
    Trajectory binary_trajectory;              // the two binary bodies only
};

// Azimuthally averaged inward radial acceleration exerted on a test point at
// radius r by the discrete ring (negative = net outward pull, as for a
// planar ring seen from inside).  Used to start the binary on a near-circular
// orbit of the combined field.
double ring_mean_radial_pull(const BucketConfig& cfg, const RingSimConfig& sim, double r);

BucketSimResult bucket_simulation(const BucketConfig& cfg, const RingSimConfig& sim);

}  // namespace relmech
