#pragma once

#include <utility>
#include <vector>

#include "relmech/frame.hpp"
#include "relmech/potential.hpp"
#include "relmech/system.hpp"

namespace relmech {

// Every multi-form quantity below implements each equivalent formulation
// independently so tests can cross-check them against one another.

enum class InertiaForm { SingleBody, Pairwise };
enum class JForm { AbsoluteMinusCm, CmRelative, Pairwise };
enum class KineticLevel { Absolute, Cm, Relational };
enum class KineticForm { Direct, Pairwise };
enum class LagrangianForm { Relational, CmDecomposed };

std::pair<Vec3, Vec3> center_of_mass(const SystemState& state);

// Intrinsic (CM) inertia tensor: single-body sum m_i (|x_ic|^2 I - x_ic x_ic^T)
// or the equivalent pairwise sum over m_ij and x_ij.
Mat3 inertia_tensor(const SystemState& state, InertiaForm form = InertiaForm::SingleBody);

// Inertia tensor about the coordinate origin (absolute form); satisfies
// absolute = intrinsic + M (|x_c|^2 I - x_c x_c^T).
Mat3 absolute_inertia_tensor(const SystemState& state);

// CM-frame angular momentum in its three equivalent forms.
Vec3 angular_momentum(const SystemState& state, JForm form = JForm::CmRelative);

// Omega = pinv(inertia) . J; null directions carry zero component.
Vec3 omega(const SystemState& state);
Vec3 omega(const FrameData& frame);

// Kinetic energies: absolute T, CM-frame level, and the gauge-invariant
// relational level (CM-frame minus J.Omega/2). The form selects which of the
// two equivalent CM-frame sums evaluates the CM part.
double kinetic_energy(const SystemState& state, KineticLevel level,
                      KineticForm form = KineticForm::Direct);
double kinetic_energy(const SystemState& state, const FrameData& frame, KineticLevel level,
                      KineticForm form = KineticForm::Direct);

double potential_energy(const SystemState& state, const PairPotential& potential);

// Relational Lagrangian: relational kinetic energy minus V, or the
// decomposed form sum m_i |v_ic - Omega x x_ic|^2 / 2 - V.
double lagrangian(const SystemState& state, const PairPotential& potential,
                  LagrangianForm form = LagrangianForm::Relational);

// Canonical momenta m_i (v_ic - Omega x x_ic). Their total and their
// CM-frame moment vanish identically for every state.
std::vector<Vec3> canonical_momenta(const SystemState& state);
std::vector<Vec3> canonical_momenta(const SystemState& state, const FrameData& frame);

// (sum_i P_i, sum_i x_ic x P_i) — both are structural zeros of the theory.
std::pair<Vec3, Vec3> constraint_residuals(const SystemState& state);

// H = sum_i |P_i|^2 / 2 m_i + V; equals the relational kinetic energy + V.
double hamiltonian(const SystemState& state, const PairPotential& potential);

}  // namespace relmech
