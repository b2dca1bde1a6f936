#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "relmech/errors.hpp"

namespace relmech {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Body {
    double mass = 1.0;
    std::string label;
};

// Snapshot of N point bodies: masses, positions, velocities, time.
// Everything downstream (frames, energies, trajectories) is derived from it.
struct SystemState {
    std::vector<Body> bodies;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    double time = 0.0;

    std::size_t size() const { return bodies.size(); }

    // Throws InvalidState on size mismatch, non-positive mass, or any
    // non-finite component.
    void validate() const {
        if (bodies.empty()) throw InvalidState("state has no bodies");
        if (positions.size() != bodies.size() || velocities.size() != bodies.size())
            throw InvalidState("positions/velocities length differs from body count");
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            if (!(bodies[i].mass > 0.0) || !std::isfinite(bodies[i].mass))
                throw InvalidState("body " + std::to_string(i) + ": mass must be positive and finite");
            if (!positions[i].allFinite() || !velocities[i].allFinite())
                throw InvalidState("body " + std::to_string(i) + ": non-finite component");
        }
        if (!std::isfinite(time)) throw InvalidState("non-finite time");
    }

    double total_mass() const {
        double m = 0.0;
        for (const auto& b : bodies) m += b.mass;
        return m;
    }
};

inline SystemState make_state(const std::vector<double>& masses,
                              const std::vector<Vec3>& pos,
                              const std::vector<Vec3>& vel,
                              double time = 0.0) {
    SystemState s;
    s.bodies.reserve(masses.size());
    for (double m : masses) s.bodies.push_back(Body{m, {}});
    s.positions = pos;
    s.velocities = vel;
    s.time = time;
    s.validate();
    return s;
}

}  // namespace relmech
