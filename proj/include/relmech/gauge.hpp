#pragma once

#include "relmech/rng.hpp"
#include "relmech/system.hpp"

namespace relmech {

// Time-dependent rigid translation + rotation (the extended symmetry group).
// The translation is cubic-polynomial + sinusoid per component; the rotation
// is about a fixed axis with a quadratic-polynomial + sinusoid angle. Both
// families have closed-form first and second derivatives, which the
// equation-of-motion residual checks rely on. Constant translations/boosts
// and fixed rotations are the degenerate special cases.
struct GaugePath {
    // xi(t) = a0 + a1 t + a2 t^2 + a3 t^3 + amp_t * sin(w_t t + phase_t)
    Vec3 a0 = Vec3::Zero(), a1 = Vec3::Zero(), a2 = Vec3::Zero(), a3 = Vec3::Zero();
    Vec3 amp_t = Vec3::Zero();
    double w_t = 0.0, phase_t = 0.0;

    // angle(t) = b0 + b1 t + b2 t^2 + amp_r * sin(w_r t + phase_r), about `axis`
    Vec3 axis = Vec3::UnitZ();
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double amp_r = 0.0, w_r = 0.0, phase_r = 0.0;

    Vec3 xi(double t) const {
        return a0 + a1 * t + a2 * (t * t) + a3 * (t * t * t) +
               amp_t * std::sin(w_t * t + phase_t);
    }
    Vec3 xi_dot(double t) const {
        return a1 + 2.0 * a2 * t + 3.0 * a3 * (t * t) +
               amp_t * (w_t * std::cos(w_t * t + phase_t));
    }
    Vec3 xi_ddot(double t) const {
        return 2.0 * a2 + 6.0 * a3 * t - amp_t * (w_t * w_t * std::sin(w_t * t + phase_t));
    }

    double angle(double t) const {
        return b0 + b1 * t + b2 * t * t + amp_r * std::sin(w_r * t + phase_r);
    }
    double angle_dot(double t) const {
        return b1 + 2.0 * b2 * t + amp_r * w_r * std::cos(w_r * t + phase_r);
    }
    double angle_ddot(double t) const {
        return 2.0 * b2 - amp_r * w_r * w_r * std::sin(w_r * t + phase_r);
    }

    Mat3 rotation(double t) const {
        return Eigen::AngleAxisd(angle(t), axis.normalized()).toRotationMatrix();
    }
    // Angular velocity of R(t): for a fixed axis, omega = axis * angle_dot.
    Vec3 omega(double t) const { return axis.normalized() * angle_dot(t); }
    Vec3 omega_dot(double t) const { return axis.normalized() * angle_ddot(t); }

    bool is_identity() const {
        return a0.isZero() && a1.isZero() && a2.isZero() && a3.isZero() && amp_t.isZero() &&
               b0 == 0.0 && b1 == 0.0 && b2 == 0.0 && amp_r == 0.0;
    }

    static GaugePath identity() { return {}; }

    static GaugePath constant_translation(const Vec3& c) {
        GaugePath g;
        g.a0 = c;
        return g;
    }

    static GaugePath uniform_rotation(const Vec3& omega) {
        GaugePath g;
        const double w = omega.norm();
        g.axis = w > 0.0 ? Vec3(omega / w) : Vec3::UnitZ();
        g.b1 = w;
        return g;
    }

    // Smooth random path with derivatives of order `scale`.
    static GaugePath random(Rng& rng, double scale = 1.0) {
        GaugePath g;
        auto rv = [&](double s) {
            return Vec3(rng.uniform(-s, s), rng.uniform(-s, s), rng.uniform(-s, s));
        };
        g.a0 = rv(2.0 * scale);
        g.a1 = rv(scale);
        g.a2 = rv(0.5 * scale);
        g.a3 = rv(0.2 * scale);
        g.amp_t = rv(scale);
        g.w_t = rng.uniform(0.3, 2.0);
        g.phase_t = rng.uniform(0.0, 6.28);
        g.axis = rv(1.0);
        if (g.axis.norm() < 1e-6) g.axis = Vec3::UnitZ();
        g.b0 = rng.uniform(-3.0, 3.0);
        g.b1 = rng.uniform(-scale, scale);
        g.b2 = rng.uniform(-0.3 * scale, 0.3 * scale);
        g.amp_r = rng.uniform(-scale, scale);
        g.w_r = rng.uniform(0.3, 2.0);
        g.phase_r = rng.uniform(0.0, 6.28);
        return g;
    }
};

}  // namespace relmech
