#pragma once

#include <stdexcept>
#include <string>

namespace relmech {

// Common base so callers can catch every library failure in one clause.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// State construction / validation failures (size mismatch, non-finite data,
// non-positive mass).
struct InvalidState : Error {
    using Error::Error;
};

// Inertia tensor has no usable eigenvalue (N=1, all bodies coincident) while
// an inverse is required.
struct DegenerateInertia : Error {
    using Error::Error;
};

// Two bodies closer than the configured floor of a singular potential.
struct SingularSeparation : Error {
    using Error::Error;
};

// Residual evaluation requested at a sample without both neighbors.
struct InsufficientSamples : Error {
    using Error::Error;
};

// Integrator produced a non-finite component.
struct StepRejected : Error {
    using Error::Error;
};

// Iterative linear solver exceeded its iteration cap.
struct SolverDiverged : Error {
    using Error::Error;
};

// Requested Gaussian packet would overlap the hard-wall boundary (< 5 sigma).
struct PacketTouchesWall : Error {
    using Error::Error;
};

// Config file is not syntactically valid.
struct ParseError : Error {
    using Error::Error;
};

// Config file is well-formed but violates the schema; carries the offending
// key path (e.g. "bodies[2].mass").
struct SchemaError : Error {
    std::string key_path;
    SchemaError(std::string path, const std::string& msg)
        : Error(path.empty() ? msg : path + ": " + msg), key_path(std::move(path)) {}
};

}  // namespace relmech
