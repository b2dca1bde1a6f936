#pragma once

#include <vector>

#include "relmech/system.hpp"

namespace relmech {

// Derived center-of-mass-frame data, computed once per state and shared by
// every downstream quantity (J, Omega, energies, momenta couple through it).
struct FrameData {
    Vec3 x_c = Vec3::Zero();
    Vec3 u_c = Vec3::Zero();
    double total_mass = 0.0;
    std::size_t n_bodies = 0;
    std::vector<double> pair_masses;  // N*N row-major, m_i m_j / M
    Mat3 inertia = Mat3::Zero();      // intrinsic tensor about the CM
    Mat3 inertia_pinv = Mat3::Zero(); // Moore-Penrose pseudo-inverse
    Vec3 J = Vec3::Zero();            // CM-frame angular momentum
    Vec3 Omega = Vec3::Zero();        // angular velocity, pinv(inertia) * J
    bool inertia_degenerate = false;  // rank-deficient inertia tensor

    double pair_mass(std::size_t i, std::size_t j) const { return pair_masses[i * n_bodies + j]; }
};

// Eigen-decomposition pseudo-inverse of a symmetric PSD tensor. Eigenvalues
// below null_threshold * (largest eigenvalue) are treated as exact zeros.
// Throws DegenerateInertia when every eigenvalue is below threshold.
Mat3 inertia_inverse(const Mat3& tensor, double null_threshold = 1e-12);

// Full frame computation. If the inertia tensor is entirely degenerate but
// J vanishes, Omega is set to zero (a valid gauge choice); a nonzero J with
// a fully degenerate tensor propagates DegenerateInertia.
FrameData compute_frame(const SystemState& state, double null_threshold = 1e-12);

}  // namespace relmech
