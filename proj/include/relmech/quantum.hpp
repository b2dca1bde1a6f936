#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "relmech/errors.hpp"
#include "relmech/potential.hpp"
#include "relmech/rng.hpp"

namespace relmech {

using cdouble = std::complex<double>;
using CField = std::vector<cdouble>;  // complex amplitudes, row-major (x-major)
using RField = std::vector<double>;   // real coefficient fields

enum class HamiltonianMode { Composed, Truncated };

// Planar two-body system on the reduced relative coordinate r = x_1 - x_2.
// The grid samples a square box [-half_width, half_width)^2 with a half-cell
// offset, so the coincidence point r = 0 is never a grid point.
struct QuantumConfig {
    int n = 128;               // points per axis
    double half_width = 3.2;   // box half-width
    double m1 = 1.0;
    double m2 = 1.0;
    double hbar = 1.0;
    // Isotropic moment of inertia contributed by distant matter, added
    // pointwise to the two-body m12 |r|^2. Zero = the isolated pair.
    double background_inertia = 0.0;
    // Softening added to the inertia before inversion; negative = use the
    // default m12 (2h)^2. Regularizes the r -> 0 coincidence region.
    double eps_soft = -1.0;
    // False switches every rotational-inertia coupling off (the limit of an
    // infinitely stiff inertial background): operators become textbook ones.
    bool machian_terms = true;

    void validate() const;
};

struct Wavefunction {
    CField amplitudes;
    double time = 0.0;
};

// Precomputed fields and matrix-free operator applications.
class QuantumModel {
  public:
    explicit QuantumModel(const QuantumConfig& cfg);

    const QuantumConfig& config() const { return cfg_; }
    int n() const { return cfg_.n; }
    double h() const { return h_; }
    double hbar() const { return cfg_.hbar; }
    double mass(int i) const { return i == 0 ? cfg_.m1 : cfg_.m2; }
    double total_mass() const { return cfg_.m1 + cfg_.m2; }
    double reduced_mass() const { return cfg_.m1 * cfg_.m2 / (cfg_.m1 + cfg_.m2); }
    bool machian() const { return cfg_.machian_terms; }
    double softening() const { return eps_soft_; }

    // CM-frame position field of particle j (j in {0,1}), component s, as a
    // multiplication operator: x_jc^s = W_j r^s with W = (m2/M, -m1/M).
    double cm_weight(int j) const { return j == 0 ? cfg_.m2 / total_mass() : -cfg_.m1 / total_mass(); }
    // Chain-rule sign of the particle-j CM-frame gradient on the relative
    // coordinate: grad_1c = +d/dr, grad_2c = -d/dr.
    double grad_sign(int j) const { return j == 0 ? 1.0 : -1.0; }

    const RField& axis_x() const { return rx_; }
    const RField& axis_y() const { return ry_; }
    const RField& inertia_field() const { return inertia_zz_; }
    const RField& inverse_inertia_field() const { return beta_; }
    const RField& potential_field() const { return potential_; }

    void set_potential(const PairPotential& pot);
    void set_potential_field(RField v);

    // 4th-order centered first derivative along axis (0 = x, 1 = y), hard
    // (Dirichlet) walls realized as zero padding. Exactly antisymmetric.
    CField d1(const CField& f, int axis) const;

    // p_ic^k = -i hbar grad_ic^k on the reduced coordinate.
    CField momentum(const CField& f, int particle, int comp) const;

    // Canonical momentum P_i^k: the plain momentum plus the symmetrized
    // rotational coupling through the pointwise inverse inertia. Each of the
    // two orderings is the exact discrete adjoint of the other, so the sum
    // is hermitian to round-off.
    CField canonical_momentum(const CField& f, int particle, int comp) const;

    // Footnote variant with every coefficient to the left of the derivative;
    // not hermitian. Kept as the negative control.
    CField canonical_momentum_unsymmetrized(const CField& f, int particle, int comp) const;

    // H psi = sum_i P_i.(P_i psi)/2m_i + V psi (composed), or the expanded
    // first-order form with the inverse-inertia gradients dropped (truncated).
    CField hamiltonian(const CField& f, HamiltonianMode mode = HamiltonianMode::Composed) const;

    cdouble inner(const CField& a, const CField& b) const;  // conj(a).b h^2
    double norm(const CField& a) const;
    void normalize(CField& a) const;

    // Normalized Gaussian x plane wave. By default rejects packets whose
    // 5-sigma contour leaves the box.
    Wavefunction gaussian_packet(double cx, double cy, double sigma, double kx, double ky,
                                 bool enforce_wall_margin = true) const;

    double expectation_position(const CField& psi, int axis) const;
    // <psi| field * |psi> for a real multiplication operator.
    double expectation_field(const CField& psi, const RField& field) const;
    // Re <psi| op psi> given the already-applied operator result.
    double expectation_applied(const CField& psi, const CField& op_psi) const;

    // Hermiticity defect |<a|Op b> - <Op a|b>| / (|Op a| |b|).
    double hermiticity_defect(const std::function<CField(const CField&)>& op,
                              const CField& a, const CField& b) const;
    // Linearity defect |Op(alpha a + beta b) - alpha Op(a) - beta Op(b)| scaled.
    double linearity_defect(const std::function<CField(const CField&)>& op, const CField& a,
                            const CField& b, cdouble alpha, cdouble beta) const;

    // Interior L2 norm over cells at least `margin_cells` from every wall.
    double interior_norm(const CField& f, int margin_cells) const;

    // CM-frame position field of particle j, component s (W_j r^s).
    RField cm_position_field(int j, int s) const;

    // Pointwise inverse-inertia coupling m_i sum_{l,s} eps(n,l,z) eps(z,s,k)
    // beta x_jc^s x_ic^l shared by the position-momentum bracket and the
    // expectation-evolution correction.
    RField rotational_coupling_field(int j, int k, int i, int nn) const;

    // Residual of [x_jc^k, P_i^n] psi against i hbar (delta_kn * w + rotational
    // coupling) psi. With cm_constrained = true the delta coefficient is the
    // reduced-space projector weight W_j T_i (the relative grid carries the
    // CM constraint identically); false uses the naive delta_ij reading.
    double commutator_x_P_residual(const CField& psi, int j, int k, int i, int nn,
                                   bool cm_constrained, int margin_cells) const;

    // Residual of [p_jc^k, P_i^n] psi against the first-order coupling
    // formula, normalized by hbar * |p psi| on the interior.
    double commutator_p_P_residual(const CField& psi, int j, int k, int i, int nn,
                                   bool cm_constrained, int margin_cells) const;

    // Residual of [x_jc^k, p_ic^n] against i hbar delta_kn W_j T_i.
    double commutator_x_p_residual(const CField& psi, int j, int k, int i, int nn,
                                   int margin_cells) const;

    // |H_composed psi - H_truncated psi| / |H_composed psi|.
    double mode_difference(const CField& psi) const;

    std::size_t size() const { return rx_.size(); }

  private:
    QuantumConfig cfg_;
    double h_ = 0.0;
    double eps_soft_ = 0.0;
    RField rx_, ry_;          // coordinate fields
    RField inertia_zz_;       // m12 |r|^2 + background
    RField beta_;             // 1 / (inertia + softening); all zero when machian off
    RField potential_;        // pointwise potential on the relative coordinate
};

}  // namespace relmech
