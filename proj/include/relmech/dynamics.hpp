#pragma once

#include <string>
#include <vector>

#include "relmech/gauge.hpp"
#include "relmech/potential.hpp"
#include "relmech/relational.hpp"

namespace relmech {

// Uniformly sampled time series of states. sample[k].time = t0 + k dt.
struct Trajectory {
    std::vector<SystemState> samples;
    double dt = 0.0;
    std::string method = "rk4";

    std::size_t size() const { return samples.size(); }
};

std::vector<Vec3> newtonian_accelerations(const SystemState& state,
                                          const PairPotential& potential);

// Fixed-step RK4 in the frame class with resting CM and zero total spin.
// The initial state's CM velocity is always removed; if its angular velocity
// is nonzero, the rigid rotation rate is subtracted first (a gauge move,
// reported through removed_rotation). Positions are recentered on the CM.
// In this gauge the equation of motion is plain Newton, and the system's
// angular momentum stays zero along the trajectory.
Trajectory integrate_newtonian_gauge(const SystemState& initial, const PairPotential& potential,
                                     double dt, int steps, bool* removed_rotation = nullptr);

// Finite dressing x -> R(t) x + xi(t), v -> R v + omega x (R x) + xi_dot.
// Relational scalars computed from the result match the input trajectory.
Trajectory apply_gauge(const Trajectory& traj, const GaugePath& gauge);

struct EomResidual {
    std::vector<Vec3> per_body;  // m_i a_ic - (force + inertial terms)
    double max_norm = 0.0;
    double sum_norm = 0.0;
};

// Residual of the relational equation of motion
//   m_i d2x_ic/dt2 = -grad_ic V + m_i (dOmega/dt x x_ic + 2 Omega x v_ic
//                                      - Omega x (Omega x x_ic))
// at sample `index`, with d2x_ic/dt2 and dOmega/dt taken by centered
// differences over neighboring samples (2nd order in dt). Valid trajectories
// in any gauge drive this to the finite-difference floor.
EomResidual eom_residual(const Trajectory& traj, const PairPotential& potential, int index);

struct GaugeVariation {
    double dT = 0.0;      // first-order change of absolute kinetic energy
    double dTcm = 0.0;    // first-order change of CM-frame kinetic energy
    double dTstar = 0.0;  // first-order change of the relational kinetic energy
};

// Measures first-order variations under the infinitesimal maps
// v -> v + eps*xi_dot (translation rate) and v_ic -> v_ic + eps*(omega x x_ic)
// (rotation rate), divided by eps. Expected: dT = xi_dot . P_total,
// dTcm = omega . J, dTstar = 0.
GaugeVariation lagrangian_gauge_variation(const SystemState& state, const Vec3& xi_dot,
                                          const Vec3& omega_rate, double eps = 1e-6);

// max_t |H(t) - H(0)| / max(|H(0)|, floor)
double energy_drift(const Trajectory& traj, const PairPotential& potential,
                    double floor = 1e-12);

// Full relational acceleration of body i: pair forces plus the inertial
// terms driven by Omega (from the state) and the supplied Omega_dot.
Vec3 machian_acceleration(const SystemState& state, std::size_t i,
                          const PairPotential& potential, const Vec3& omega_dot);

}  // namespace relmech
