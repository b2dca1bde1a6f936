#pragma once

#include <functional>

#include "relmech/errors.hpp"
#include "relmech/system.hpp"

namespace relmech {

// Pair interaction depending only on the separation vector x_ij = x_i - x_j,
// which keeps every potential translation-invariant by construction.
// Gravity: V_ij = -G m_i m_j / |x_ij| (attractive).
// Harmonic: V_ij = k/2 |x_ij|^2 (mass-independent spring on the separation).
struct PairPotential {
    enum class Kind { None, Gravity, Harmonic, Custom };

    Kind kind = Kind::None;
    double G = 1.0;                  // gravity strength
    double k = 1.0;                  // harmonic spring constant
    double separation_floor = 1e-9;  // below this, gravity signals SingularSeparation
    std::function<double(const Vec3&)> custom_value;
    std::function<Vec3(const Vec3&)> custom_gradient;  // dV/d(x_ij)

    static PairPotential none() { return {}; }
    static PairPotential gravity(double G_) {
        PairPotential p;
        p.kind = Kind::Gravity;
        p.G = G_;
        return p;
    }
    static PairPotential harmonic(double k_) {
        PairPotential p;
        p.kind = Kind::Harmonic;
        p.k = k_;
        return p;
    }

    double pair_value(double m_i, double m_j, const Vec3& x_ij) const {
        switch (kind) {
            case Kind::None:
                return 0.0;
            case Kind::Gravity: {
                const double r = x_ij.norm();
                if (r < separation_floor)
                    throw SingularSeparation("separation " + std::to_string(r) +
                                             " below floor " + std::to_string(separation_floor));
                return -G * m_i * m_j / r;
            }
            case Kind::Harmonic:
                return 0.5 * k * x_ij.squaredNorm();
            case Kind::Custom:
                return custom_value(x_ij);
        }
        return 0.0;
    }

    // Gradient with respect to x_ij; the force on body i from body j is the
    // negative of this (and +gradient on body j).
    Vec3 pair_gradient(double m_i, double m_j, const Vec3& x_ij) const {
        switch (kind) {
            case Kind::None:
                return Vec3::Zero();
            case Kind::Gravity: {
                const double r = x_ij.norm();
                if (r < separation_floor)
                    throw SingularSeparation("separation " + std::to_string(r) +
                                             " below floor " + std::to_string(separation_floor));
                return G * m_i * m_j * x_ij / (r * r * r);
            }
            case Kind::Harmonic:
                return k * x_ij;
            case Kind::Custom:
                return custom_gradient(x_ij);
        }
        return Vec3::Zero();
    }
};

}  // namespace relmech
