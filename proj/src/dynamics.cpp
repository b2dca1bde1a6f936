#include "relmech/dynamics.hpp"

#include <cmath>

namespace relmech {

std::vector<Vec3> newtonian_accelerations(const SystemState& state,
                                          const PairPotential& potential) {
    const std::size_t n = state.size();
    std::vector<Vec3> acc(n, Vec3::Zero());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec3 g = potential.pair_gradient(state.bodies[i].mass, state.bodies[j].mass,
                                                   state.positions[i] - state.positions[j]);
            acc[i] -= g / state.bodies[i].mass;
            acc[j] += g / state.bodies[j].mass;
        }
    return acc;
}

namespace {

void rk4_step(SystemState& s, const PairPotential& potential, double dt) {
    const std::size_t n = s.size();
    const std::vector<Vec3> x0 = s.positions, v0 = s.velocities;

    const std::vector<Vec3> a1 = newtonian_accelerations(s, potential);
    std::vector<Vec3> xt(n), vt(n);

    for (std::size_t i = 0; i < n; ++i) {
        xt[i] = x0[i] + 0.5 * dt * v0[i];
        vt[i] = v0[i] + 0.5 * dt * a1[i];
    }
    s.positions = xt;
    const std::vector<Vec3> a2 = newtonian_accelerations(s, potential);
    const std::vector<Vec3> v2 = vt;

    for (std::size_t i = 0; i < n; ++i) {
        xt[i] = x0[i] + 0.5 * dt * v2[i];
        vt[i] = v0[i] + 0.5 * dt * a2[i];
    }
    s.positions = xt;
    const std::vector<Vec3> a3 = newtonian_accelerations(s, potential);
    const std::vector<Vec3> v3 = vt;

    for (std::size_t i = 0; i < n; ++i) {
        xt[i] = x0[i] + dt * v3[i];
        vt[i] = v0[i] + dt * a3[i];
    }
    s.positions = xt;
    const std::vector<Vec3> a4 = newtonian_accelerations(s, potential);
    const std::vector<Vec3> v4 = vt;

    for (std::size_t i = 0; i < n; ++i) {
        s.positions[i] = x0[i] + dt / 6.0 * (v0[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]);
        s.velocities[i] = v0[i] + dt / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        if (!s.positions[i].allFinite() || !s.velocities[i].allFinite())
            throw StepRejected("non-finite state component at t = " + std::to_string(s.time));
    }
    s.time += dt;
}

}  // namespace

Trajectory integrate_newtonian_gauge(const SystemState& initial, const PairPotential& potential,
                                     double dt, int steps, bool* removed_rotation) {
    initial.validate();
    if (!(dt > 0.0) || steps < 0) throw Error("integrate: dt must be > 0 and steps >= 0");

    SystemState s = initial;
    FrameData f = compute_frame(s);
    bool removed = false;
    if (f.Omega.norm() > 1e-12) {
        // Subtract the rigid rotation rate: a pure gauge move into the
        // spinless frame class.
        for (std::size_t i = 0; i < s.size(); ++i)
            s.velocities[i] -= f.Omega.cross(s.positions[i] - f.x_c);
        removed = true;
        f = compute_frame(s);
    }
    if (removed_rotation) *removed_rotation = removed;
    for (std::size_t i = 0; i < s.size(); ++i) {
        s.positions[i] -= f.x_c;
        s.velocities[i] -= f.u_c;
    }

    Trajectory traj;
    traj.dt = dt;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    traj.samples.push_back(s);
    for (int k = 0; k < steps; ++k) {
        rk4_step(s, potential, dt);
        traj.samples.push_back(s);
    }
    return traj;
}

Trajectory apply_gauge(const Trajectory& traj, const GaugePath& gauge) {
    Trajectory out;
    out.dt = traj.dt;
    out.method = traj.method;
    out.samples.reserve(traj.samples.size());
    for (const SystemState& s : traj.samples) {
        const double t = s.time;
        const Mat3 R = gauge.rotation(t);
        const Vec3 w = gauge.omega(t);
        const Vec3 xi = gauge.xi(t);
        const Vec3 xid = gauge.xi_dot(t);
        SystemState d = s;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Vec3 rx = R * s.positions[i];
            d.positions[i] = rx + xi;
            d.velocities[i] = R * s.velocities[i] + w.cross(rx) + xid;
        }
        out.samples.push_back(std::move(d));
    }
    return out;
}

EomResidual eom_residual(const Trajectory& traj, const PairPotential& potential, int index) {
    if (index < 1 || index + 1 >= static_cast<int>(traj.size()))
        throw InsufficientSamples("eom_residual needs both neighbors of sample " +
                                  std::to_string(index));
    const SystemState& prev = traj.samples[index - 1];
    const SystemState& cur = traj.samples[index];
    const SystemState& next = traj.samples[index + 1];
    const double dt = traj.dt;

    const FrameData fp = compute_frame(prev);
    const FrameData fc = compute_frame(cur);
    const FrameData fn = compute_frame(next);
    const Vec3 omega_dot = (fn.Omega - fp.Omega) / (2.0 * dt);

    EomResidual res;
    res.per_body.resize(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) {
        // Centered difference of the CM-frame velocity gives the CM-frame
        // acceleration to 2nd order.
        const Vec3 a_ic = ((next.velocities[i] - fn.u_c) - (prev.velocities[i] - fp.u_c)) /
                          (2.0 * dt);
        const Vec3 x_ic = cur.positions[i] - fc.x_c;
        const Vec3 v_ic = cur.velocities[i] - fc.u_c;
        const double m = cur.bodies[i].mass;

        Vec3 force = Vec3::Zero();
        for (std::size_t j = 0; j < cur.size(); ++j) {
            if (j == i) continue;
            force -= potential.pair_gradient(m, cur.bodies[j].mass,
                                             cur.positions[i] - cur.positions[j]);
        }
        const Vec3 inertial = omega_dot.cross(x_ic) + 2.0 * fc.Omega.cross(v_ic) -
                              fc.Omega.cross(fc.Omega.cross(x_ic));
        res.per_body[i] = m * a_ic - force - m * inertial;
        const double nrm = res.per_body[i].norm();
        res.max_norm = std::max(res.max_norm, nrm);
        res.sum_norm += nrm;
    }
    return res;
}

GaugeVariation lagrangian_gauge_variation(const SystemState& state, const Vec3& xi_dot,
                                          const Vec3& omega_rate, double eps) {
    state.validate();
    const FrameData f = compute_frame(state);

    auto kinetic_triple = [&](const SystemState& s) {
        const FrameData fr = compute_frame(s);
        return std::array<double, 3>{
            kinetic_energy(s, fr, KineticLevel::Absolute),
            kinetic_energy(s, fr, KineticLevel::Cm),
            kinetic_energy(s, fr, KineticLevel::Relational)};
    };

    const auto base = kinetic_triple(state);

    // Translation rate shifts every velocity; rotation rate shifts each
    // velocity by omega x x_ic (the first-order form of a rotating dressing).
    SystemState var = state;
    for (std::size_t i = 0; i < var.size(); ++i) {
        var.velocities[i] += eps * xi_dot;
        var.velocities[i] += eps * omega_rate.cross(state.positions[i] - f.x_c);
    }
    const auto bumped = kinetic_triple(var);

    GaugeVariation g;
    g.dT = (bumped[0] - base[0]) / eps;
    g.dTcm = (bumped[1] - base[1]) / eps;
    g.dTstar = (bumped[2] - base[2]) / eps;
    return g;
}

double energy_drift(const Trajectory& traj, const PairPotential& potential, double floor) {
    if (traj.size() < 2) throw InsufficientSamples("energy_drift needs at least 2 samples");
    const double H0 = hamiltonian(traj.samples.front(), potential);
    double worst = 0.0;
    for (const SystemState& s : traj.samples)
        worst = std::max(worst, std::abs(hamiltonian(s, potential) - H0));
    return worst / std::max(std::abs(H0), floor);
}

Vec3 machian_acceleration(const SystemState& state, std::size_t i,
                          const PairPotential& potential, const Vec3& omega_dot) {
    state.validate();
    if (i >= state.size()) throw Error("machian_acceleration: body index out of range");
    const FrameData f = compute_frame(state);
    const double m = state.bodies[i].mass;
    Vec3 force = Vec3::Zero();
    for (std::size_t j = 0; j < state.size(); ++j) {
        if (j == i) continue;
        force -= potential.pair_gradient(m, state.bodies[j].mass,
                                         state.positions[i] - state.positions[j]);
    }
    const Vec3 x_ic = state.positions[i] - f.x_c;
    const Vec3 v_ic = state.velocities[i] - f.u_c;
    return force / m + omega_dot.cross(x_ic) + 2.0 * f.Omega.cross(v_ic) -
           f.Omega.cross(f.Omega.cross(x_ic));
}

}  // namespace relmech
