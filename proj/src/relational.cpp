#include "relmech/relational.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace relmech {

Mat3 inertia_inverse(const Mat3& tensor, double null_threshold) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(tensor);
    const Vec3 evals = es.eigenvalues();
    const double largest = evals.maxCoeff();
    if (!(largest > 0.0)) throw DegenerateInertia("inertia tensor has no positive eigenvalue");
    const double cutoff = null_threshold * largest;
    Vec3 inv;
    int live = 0;
    for (int a = 0; a < 3; ++a) {
        if (evals[a] > cutoff) {
            inv[a] = 1.0 / evals[a];
            ++live;
        } else {
            inv[a] = 0.0;  // exact null direction
        }
    }
    if (live == 0) throw DegenerateInertia("all inertia eigenvalues below threshold");
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

FrameData compute_frame(const SystemState& state, double null_threshold) {
    state.validate();
    const std::size_t n = state.size();
    FrameData f;
    f.total_mass = state.total_mass();
    f.n_bodies = n;
    Vec3 mx = Vec3::Zero(), mv = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        mx += state.bodies[i].mass * state.positions[i];
        mv += state.bodies[i].mass * state.velocities[i];
    }
    f.x_c = mx / f.total_mass;
    f.u_c = mv / f.total_mass;

    f.pair_masses.resize(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            f.pair_masses[i * n + j] = state.bodies[i].mass * state.bodies[j].mass / f.total_mass;

    Mat3 inert = Mat3::Zero();
    Vec3 J = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const double m = state.bodies[i].mass;
        const Vec3 xc = state.positions[i] - f.x_c;
        const Vec3 vc = state.velocities[i] - f.u_c;
        inert += m * (xc.squaredNorm() * Mat3::Identity() - xc * xc.transpose());
        J += m * xc.cross(vc);
    }
    f.inertia = inert;
    f.J = J;

    try {
        f.inertia_pinv = inertia_inverse(inert, null_threshold);
        f.Omega = f.inertia_pinv * J;
        Eigen::SelfAdjointEigenSolver<Mat3> es(inert);
        f.inertia_degenerate = es.eigenvalues().minCoeff() <= null_threshold * es.eigenvalues().maxCoeff();
    } catch (const DegenerateInertia&) {
        // No usable inertia (N=1, coincident bodies). A spinless state still
        // has a well-defined Omega = 0; anything else is genuinely singular.
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 xc = state.positions[i] - f.x_c;
            const Vec3 vc = state.velocities[i] - f.u_c;
            scale += state.bodies[i].mass * xc.norm() * vc.norm();
        }
        if (J.norm() > 1e-12 * std::max(scale, 1e-300)) throw;
        f.inertia_pinv = Mat3::Zero();
        f.Omega = Vec3::Zero();
        f.inertia_degenerate = true;
    }
    return f;
}

std::pair<Vec3, Vec3> center_of_mass(const SystemState& state) {
    state.validate();
    const double M = state.total_mass();
    Vec3 mx = Vec3::Zero(), mv = Vec3::Zero();
    for (std::size_t i = 0; i < state.size(); ++i) {
        mx += state.bodies[i].mass * state.positions[i];
        mv += state.bodies[i].mass * state.velocities[i];
    }
    return {mx / M, mv / M};
}

Mat3 inertia_tensor(const SystemState& state, InertiaForm form) {
    state.validate();
    const std::size_t n = state.size();
    Mat3 out = Mat3::Zero();
    if (form == InertiaForm::SingleBody) {
        const auto [x_c, u_c] = center_of_mass(state);
        (void)u_c;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 xc = state.positions[i] - x_c;
            out += state.bodies[i].mass * (xc.squaredNorm() * Mat3::Identity() - xc * xc.transpose());
        }
    } else {
        const double M = state.total_mass();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double mij = state.bodies[i].mass * state.bodies[j].mass / M;
                const Vec3 xij = state.positions[i] - state.positions[j];
                out += mij * (xij.squaredNorm() * Mat3::Identity() - xij * xij.transpose());
            }
    }
    return out;
}

Mat3 absolute_inertia_tensor(const SystemState& state) {
    state.validate();
    Mat3 out = Mat3::Zero();
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Vec3& x = state.positions[i];
        out += state.bodies[i].mass * (x.squaredNorm() * Mat3::Identity() - x * x.transpose());
    }
    return out;
}

Vec3 angular_momentum(const SystemState& state, JForm form) {
    state.validate();
    const std::size_t n = state.size();
    Vec3 J = Vec3::Zero();
    switch (form) {
        case JForm::AbsoluteMinusCm: {
            const auto [x_c, u_c] = center_of_mass(state);
            const double M = state.total_mass();
            for (std::size_t i = 0; i < n; ++i)
                J += state.bodies[i].mass * state.positions[i].cross(state.velocities[i]);
            J -= M * x_c.cross(u_c);
            break;
        }
        case JForm::CmRelative: {
            const auto [x_c, u_c] = center_of_mass(state);
            for (std::size_t i = 0; i < n; ++i)
                J += state.bodies[i].mass *
                     (state.positions[i] - x_c).cross(state.velocities[i] - u_c);
            break;
        }
        case JForm::Pairwise: {
            const double M = state.total_mass();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double mij = state.bodies[i].mass * state.bodies[j].mass / M;
                    const Vec3 xij = state.positions[i] - state.positions[j];
                    const Vec3 vij = state.velocities[i] - state.velocities[j];
                    J += mij * xij.cross(vij);
                }
            break;
        }
    }
    return J;
}

Vec3 omega(const FrameData& frame) { return frame.Omega; }

Vec3 omega(const SystemState& state) { return compute_frame(state).Omega; }

double kinetic_energy(const SystemState& state, const FrameData& frame, KineticLevel level,
                      KineticForm form) {
    const std::size_t n = state.size();
    if (level == KineticLevel::Absolute) {
        double T = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            T += 0.5 * state.bodies[i].mass * state.velocities[i].squaredNorm();
        return T;
    }
    double Tcm = 0.0;
    if (form == KineticForm::Direct) {
        for (std::size_t i = 0; i < n; ++i)
            Tcm += 0.5 * state.bodies[i].mass * (state.velocities[i] - frame.u_c).squaredNorm();
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                Tcm += 0.5 * frame.pair_mass(i, j) *
                       (state.velocities[i] - state.velocities[j]).squaredNorm();
    }
    if (level == KineticLevel::Cm) return Tcm;
    return Tcm - 0.5 * frame.J.dot(frame.Omega);
}

double kinetic_energy(const SystemState& state, KineticLevel level, KineticForm form) {
    if (level == KineticLevel::Absolute) {
        state.validate();
        double T = 0.0;
        for (std::size_t i = 0; i < state.size(); ++i)
            T += 0.5 * state.bodies[i].mass * state.velocities[i].squaredNorm();
        return T;
    }
    return kinetic_energy(state, compute_frame(state), level, form);
}

double potential_energy(const SystemState& state, const PairPotential& potential) {
    state.validate();
    double V = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        for (std::size_t j = i + 1; j < state.size(); ++j)
            V += potential.pair_value(state.bodies[i].mass, state.bodies[j].mass,
                                      state.positions[i] - state.positions[j]);
    return V;
}

double lagrangian(const SystemState& state, const PairPotential& potential, LagrangianForm form) {
    const FrameData frame = compute_frame(state);
    const double V = potential_energy(state, potential);
    if (form == LagrangianForm::Relational)
        return kinetic_energy(state, frame, KineticLevel::Relational) - V;
    double K = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Vec3 xc = state.positions[i] - frame.x_c;
        const Vec3 vc = state.velocities[i] - frame.u_c;
        K += 0.5 * state.bodies[i].mass * (vc - frame.Omega.cross(xc)).squaredNorm();
    }
    return K - V;
}

std::vector<Vec3> canonical_momenta(const SystemState& state, const FrameData& frame) {
    std::vector<Vec3> P(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        const Vec3 xc = state.positions[i] - frame.x_c;
        const Vec3 vc = state.velocities[i] - frame.u_c;
        P[i] = state.bodies[i].mass * (vc - frame.Omega.cross(xc));
    }
    return P;
}

std::vector<Vec3> canonical_momenta(const SystemState& state) {
    return canonical_momenta(state, compute_frame(state));
}

std::pair<Vec3, Vec3> constraint_residuals(const SystemState& state) {
    const FrameData frame = compute_frame(state);
    const auto P = canonical_momenta(state, frame);
    Vec3 total = Vec3::Zero(), moment = Vec3::Zero();
    for (std::size_t i = 0; i < state.size(); ++i) {
        total += P[i];
        moment += (state.positions[i] - frame.x_c).cross(P[i]);
    }
    return {total, moment};
}

double hamiltonian(const SystemState& state, const PairPotential& potential) {
    const FrameData frame = compute_frame(state);
    const auto P = canonical_momenta(state, frame);
    double H = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i)
        H += P[i].squaredNorm() / (2.0 * state.bodies[i].mass);
    return H + potential_energy(state, potential);
}

}  // namespace relmech
