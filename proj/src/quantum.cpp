#include "relmech/quantum.hpp"

#include <algorithm>
#include <cmath>

namespace relmech {

namespace {

// Levi-Civita symbol on indices {0,1,2}; the planar reduction only ever uses
// the combinations with one index fixed to the out-of-plane axis 2.
inline double eps3(int i, int j, int k) {
    return 0.5 * static_cast<double>((i - j) * (j - k) * (k - i));
}

inline bool finite_field(const CField& f) {
    for (const cdouble& v : f)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

}  // namespace

void QuantumConfig::validate() const {
    if (n < 16) throw InvalidState("grid needs at least 16 points per axis");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw InvalidState("half_width must be positive and finite");
    if (!(m1 > 0.0) || !(m2 > 0.0) || !std::isfinite(m1) || !std::isfinite(m2))
        throw InvalidState("masses must be positive and finite");
    if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidState("hbar must be positive");
    if (background_inertia < 0.0 || !std::isfinite(background_inertia))
        throw InvalidState("background_inertia must be non-negative");
}

QuantumModel::QuantumModel(const QuantumConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const int n = cfg_.n;
    h_ = 2.0 * cfg_.half_width / n;
    const double m12 = reduced_mass();
    eps_soft_ = cfg_.eps_soft >= 0.0 ? cfg_.eps_soft : m12 * (2.0 * h_) * (2.0 * h_);

    const std::size_t sz = static_cast<std::size_t>(n) * n;
    rx_.resize(sz);
    ry_.resize(sz);
    inertia_zz_.resize(sz);
    beta_.resize(sz);
    potential_.assign(sz, 0.0);
    for (int ix = 0; ix < n; ++ix) {
        // half-cell offset keeps the coincidence point off the grid
        const double x = (ix + 0.5) * h_ - cfg_.half_width;
        for (int iy = 0; iy < n; ++iy) {
            const double y = (iy + 0.5) * h_ - cfg_.half_width;
            const std::size_t g = static_cast<std::size_t>(ix) * n + iy;
            rx_[g] = x;
            ry_[g] = y;
            inertia_zz_[g] = m12 * (x * x + y * y) + cfg_.background_inertia;
            beta_[g] = cfg_.machian_terms ? 1.0 / (inertia_zz_[g] + eps_soft_) : 0.0;
        }
    }
}

void QuantumModel::set_potential(const PairPotential& pot) {
    const std::size_t sz = size();
    for (std::size_t g = 0; g < sz; ++g) {
        const Vec3 r(rx_[g], ry_[g], 0.0);
        potential_[g] = pot.pair_value(cfg_.m1, cfg_.m2, r);
    }
}

void QuantumModel::set_potential_field(RField v) {
    if (v.size() != size()) throw InvalidState("potential field size mismatch");
    potential_ = std::move(v);
}

CField QuantumModel::d1(const CField& f, int axis) const {
    if (f.size() != size()) throw InvalidState("field size mismatch");
    if (axis != 0 && axis != 1) throw InvalidState("axis must be 0 or 1");
    const int n = cfg_.n;
    CField out(f.size());
    const double ca = 8.0 / (12.0 * h_);
    const double cb = 1.0 / (12.0 * h_);
    if (axis == 1) {
        for (int ix = 0; ix < n; ++ix) {
            const cdouble* row = f.data() + static_cast<std::size_t>(ix) * n;
            cdouble* orow = out.data() + static_cast<std::size_t>(ix) * n;
            for (int iy = 0; iy < std::min(2, n); ++iy) {
                const cdouble fm2 = iy >= 2 ? row[iy - 2] : cdouble{};
                const cdouble fm1 = iy >= 1 ? row[iy - 1] : cdouble{};
                const cdouble fp1 = iy + 1 < n ? row[iy + 1] : cdouble{};
                const cdouble fp2 = iy + 2 < n ? row[iy + 2] : cdouble{};
                orow[iy] = cb * (fm2 - fp2) + ca * (fp1 - fm1);
            }
            for (int iy = 2; iy < n - 2; ++iy)
                orow[iy] = cb * (row[iy - 2] - row[iy + 2]) + ca * (row[iy + 1] - row[iy - 1]);
            for (int iy = std::max(2, n - 2); iy < n; ++iy) {
                const cdouble fm2 = row[iy - 2];
                const cdouble fm1 = row[iy - 1];
                const cdouble fp1 = iy + 1 < n ? row[iy + 1] : cdouble{};
                const cdouble fp2 = iy + 2 < n ? row[iy + 2] : cdouble{};
                orow[iy] = cb * (fm2 - fp2) + ca * (fp1 - fm1);
            }
        }
    } else {
        for (int ix = 0; ix < n; ++ix) {
            const cdouble* rm2 = ix >= 2 ? f.data() + static_cast<std::size_t>(ix - 2) * n : nullptr;
            const cdouble* rm1 = ix >= 1 ? f.data() + static_cast<std::size_t>(ix - 1) * n : nullptr;
            const cdouble* rp1 = ix + 1 < n ? f.data() + static_cast<std::size_t>(ix + 1) * n : nullptr;
            const cdouble* rp2 = ix + 2 < n ? f.data() + static_cast<std::size_t>(ix + 2) * n : nullptr;
            cdouble* orow = out.data() + static_cast<std::size_t>(ix) * n;
            if (rm2 && rm1 && rp1 && rp2) {
                for (int iy = 0; iy < n; ++iy)
                    orow[iy] = cb * (rm2[iy] - rp2[iy]) + ca * (rp1[iy] - rm1[iy]);
            } else {
                for (int iy = 0; iy < n; ++iy) {
                    const cdouble fm2 = rm2 ? rm2[iy] : cdouble{};
                    const cdouble fm1 = rm1 ? rm1[iy] : cdouble{};
                    const cdouble fp1 = rp1 ? rp1[iy] : cdouble{};
                    const cdouble fp2 = rp2 ? rp2[iy] : cdouble{};
                    orow[iy] = cb * (fm2 - fp2) + ca * (fp1 - fm1);
                }
            }
        }
    }
    return out;
}

CField QuantumModel::momentum(const CField& f, int particle, int comp) const {
    CField out = d1(f, comp);
    const cdouble factor = cdouble(0.0, -cfg_.hbar * grad_sign(particle));
    for (cdouble& v : out) v *= factor;
    return out;
}

CField QuantumModel::canonical_momentum(const CField& f, int particle, int comp) const {
    if (!cfg_.machian_terms) return momentum(f, particle, comp);
    const int i = particle, k = comp;
    const std::size_t sz = size();
    const CField df0 = d1(f, 0);
    const CField df1 = d1(f, 1);
    const double Wi = cm_weight(i);
    const double Ti = grad_sign(i);
    const double mi = mass(i);
    const int l = 1 - k;
    const double c1 = eps3(k, l, 2);
    const RField& rl = l == 0 ? rx_ : ry_;

    // u = x_ic^l beta f, the field the derivative-last ordering acts on
    CField u(sz);
    for (std::size_t g = 0; g < sz; ++g) u[g] = Wi * rl[g] * beta_[g] * f[g];
    const CField du0 = d1(u, 0);
    const CField du1 = d1(u, 1);

    CField out(sz);
    const cdouble base = cdouble(0.0, -cfg_.hbar * Ti);
    const CField& dfk = k == 0 ? df0 : df1;
    for (std::size_t g = 0; g < sz; ++g) out[g] = base * dfk[g];

    static const int pairs[2][2] = {{0, 1}, {1, 0}};  // (s, nn) with eps(z,s,nn) != 0
    for (const auto& sn : pairs) {
        const int s = sn[0], nn = sn[1];
        const double c2 = eps3(2, s, nn);
        const RField& rs = s == 0 ? rx_ : ry_;
        const CField& dfn = nn == 0 ? df0 : df1;
        const CField& dun = nn == 0 ? du0 : du1;
        for (int j = 0; j < 2; ++j) {
            const double coef = 0.5 * mi * c1 * c2 * cm_weight(j);
            const cdouble pj = cdouble(0.0, -cfg_.hbar * grad_sign(j));
            for (std::size_t g = 0; g < sz; ++g) {
                // derivative-first ordering plus its exact discrete adjoint
                out[g] += coef * rs[g] * (Wi * rl[g] * beta_[g] * (pj * dfn[g]) + pj * dun[g]);
            }
        }
    }
    return out;
}

CField QuantumModel::canonical_momentum_unsymmetrized(const CField& f, int particle,
                                                      int comp) const {
    CField out = momentum(f, particle, comp);
    if (!cfg_.machian_terms) return out;
    const int i = particle, k = comp;
    const std::size_t sz = size();
    const CField df0 = d1(f, 0);
    const CField df1 = d1(f, 1);
    const double Wi = cm_weight(i);
    const double mi = mass(i);
    const int l = 1 - k;
    const double c1 = eps3(k, l, 2);
    const RField& rl = l == 0 ? rx_ : ry_;
    static const int pairs[2][2] = {{0, 1}, {1, 0}};
    for (const auto& sn : pairs) {
        const int s = sn[0], nn = sn[1];
        const double c2 = eps3(2, s, nn);
        const RField& rs = s == 0 ? rx_ : ry_;
        const CField& dfn = nn == 0 ? df0 : df1;
        for (int j = 0; j < 2; ++j) {
            const double coef = mi * c1 * c2 * cm_weight(j);
            const cdouble pj = cdouble(0.0, -cfg_.hbar * grad_sign(j));
            for (std::size_t g = 0; g < sz; ++g)
                out[g] += coef * rs[g] * Wi * rl[g] * beta_[g] * (pj * dfn[g]);
        }
    }
    return out;
}

CField QuantumModel::hamiltonian(const CField& f, HamiltonianMode mode) const {
    if (f.size() != size()) throw InvalidState("field size mismatch");
    const std::size_t sz = size();
    CField out(sz);
    for (std::size_t g = 0; g < sz; ++g) out[g] = potential_[g] * f[g];

    const bool machian_on = cfg_.machian_terms;
    if (mode == HamiltonianMode::Composed && machian_on) {
        for (int i = 0; i < 2; ++i) {
            const double inv2m = 1.0 / (2.0 * mass(i));
            for (int k = 0; k < 2; ++k) {
                const CField g1 = canonical_momentum(f, i, k);
                const CField g2 = canonical_momentum(g1, i, k);
                for (std::size_t g = 0; g < sz; ++g) out[g] += inv2m * g2[g];
            }
        }
        return out;
    }

    // Plain kinetic term. Summing the per-particle squared momenta collapses
    // to the reduced-mass Laplacian (the chain-rule signs square away),
    // which is the same stencil algebra with fewer sweeps.
    const double coef = -cfg_.hbar * cfg_.hbar / (2.0 * reduced_mass());
    const CField df0 = d1(f, 0);
    const CField df1 = d1(f, 1);
    const CField dd0 = d1(df0, 0);
    const CField dd1 = d1(df1, 1);
    for (std::size_t g = 0; g < sz; ++g) out[g] += coef * (dd0[g] + dd1[g]);

    if (mode == HamiltonianMode::Composed || !machian_on) return out;

    // Expanded first-order coupling: the composed square with the product
    // rule applied analytically, coefficient derivatives of the CM-frame
    // positions kept exactly on the reduced grid, derivatives of the inverse
    // inertia and the quadratic coupling term dropped.
    const double hb = cfg_.hbar;
    CField dd[2][2];  // dd[a][b] = d1(d1(f, a), b)
    for (int a = 0; a < 2; ++a)
        for (int bax = 0; bax < 2; ++bax) dd[a][bax] = d1(a == 0 ? df0 : df1, bax);

    static const int pairs[2][2] = {{0, 1}, {1, 0}};  // (s, nn) with eps(z,s,nn) != 0
    for (int i = 0; i < 2; ++i) {
        const double mi = mass(i);
        const double Wi = cm_weight(i);
        const double Ti = grad_sign(i);
        const double inv2m = 1.0 / (2.0 * mi);
        for (int k = 0; k < 2; ++k) {
            const int l = 1 - k;
            const double c1 = eps3(k, l, 2);
            const RField& rl = l == 0 ? rx_ : ry_;
            const CField& dfk = k == 0 ? df0 : df1;

            // u = x_ic^l beta f; uk = x_ic^l beta (p_i^k f)
            CField u(sz), uk(sz);
            const cdouble pk = cdouble(0.0, -hb * Ti);
            for (std::size_t g = 0; g < sz; ++g) {
                const double xb = Wi * rl[g] * beta_[g];
                u[g] = xb * f[g];
                uk[g] = xb * (pk * dfk[g]);
            }
            const CField du0 = d1(u, 0);
            const CField du1 = d1(u, 1);
            CField ddu[2];  // d1(d1(u, nn), k)
            ddu[0] = d1(du0, k);
            ddu[1] = d1(du1, k);
            const CField duk0 = d1(uk, 0);
            const CField duk1 = d1(uk, 1);

            for (const auto& sn : pairs) {
                const int s = sn[0], nn = sn[1];
                const double c2 = eps3(2, s, nn);
                const RField& rs = s == 0 ? rx_ : ry_;
                const CField& dfn = nn == 0 ? df0 : df1;
                const CField& dun = nn == 0 ? du0 : du1;
                const CField& dukn = nn == 0 ? duk0 : duk1;
                for (int j = 0; j < 2; ++j) {
                    const double Wj = cm_weight(j);
                    const double Tj = grad_sign(j);
                    const double coef = inv2m * 0.5 * mi * c1 * c2;
                    const double gws = s == k ? Ti * Wj : 0.0;  // d_ic^k x_jc^s
                    const double gwl = l == k ? Ti * Wi : 0.0;  // d_ic^k x_ic^l
                    const double pp = -hb * hb * Ti * Tj;       // p_i p_j prefactor
                    const double pgw = -hb * hb * Tj;           // (-i hbar) * p_j prefactor
                    const cdouble pj = cdouble(0.0, -hb * Tj);
                    for (std::size_t g = 0; g < sz; ++g) {
                        const double xjs = Wj * rs[g];
                        const double w = xjs * Wi * rl[g] * beta_[g];
                        const double gw = gws * Wi * rl[g] + gwl * xjs;
                        // coefficient-outside half: p_i^k (w p_j^nn f) with the
                        // product rule applied, plus w p_j^nn (p_i^k f)
                        cdouble acc = pp * w * (dd[nn][k][g] + dd[k][nn][g]);
                        acc += pgw * gw * beta_[g] * dfn[g];
                        // derivative-inside half: p_i^k (x_jc^s p_j^nn u) expanded,
                        // plus x_jc^s p_j^nn (uk)
                        acc += pp * xjs * ddu[nn][g];
                        acc += pgw * gws * dun[g];
                        acc += xjs * (pj * dukn[g]);
                        out[g] += coef * acc;
                    }
                }
            }
        }
    }
    return out;
}

cdouble QuantumModel::inner(const CField& a, const CField& b) const {
    if (a.size() != size() || b.size() != size()) throw InvalidState("field size mismatch");
    cdouble acc{};
    for (std::size_t g = 0; g < a.size(); ++g) acc += std::conj(a[g]) * b[g];
    return acc * (h_ * h_);
}

double QuantumModel::norm(const CField& a) const { return std::sqrt(std::max(0.0, inner(a, a).real())); }

void QuantumModel::normalize(CField& a) const {
    const double nn = norm(a);
    if (nn <= 0.0 || !std::isfinite(nn)) throw InvalidState("cannot normalize a zero or non-finite field");
    for (cdouble& v : a) v /= nn;
}

Wavefunction QuantumModel::gaussian_packet(double cx, double cy, double sigma, double kx, double ky,
                                           bool enforce_wall_margin) const {
    if (!(sigma > 0.0)) throw InvalidState("sigma must be positive");
    if (enforce_wall_margin) {
        const double margin_x = cfg_.half_width - std::abs(cx);
        const double margin_y = cfg_.half_width - std::abs(cy);
        if (5.0 * sigma - std::min(margin_x, margin_y) > 1e-12)
            throw PacketTouchesWall("packet closer than 5 sigma to a hard wall");
    }
    Wavefunction psi;
    psi.amplitudes.resize(size());
    const double inv4s2 = 1.0 / (4.0 * sigma * sigma);
    for (std::size_t g = 0; g < size(); ++g) {
        const double dx = rx_[g] - cx;
        const double dy = ry_[g] - cy;
        const double env = std::exp(-(dx * dx + dy * dy) * inv4s2);
        const double phase = kx * rx_[g] + ky * ry_[g];
        psi.amplitudes[g] = env * cdouble(std::cos(phase), std::sin(phase));
    }
    normalize(psi.amplitudes);
    return psi;
}

double QuantumModel::expectation_position(const CField& psi, int axis) const {
    return expectation_field(psi, axis == 0 ? rx_ : ry_);
}

double QuantumModel::expectation_field(const CField& psi, const RField& field) const {
    if (psi.size() != size() || field.size() != size()) throw InvalidState("field size mismatch");
    double acc = 0.0;
    for (std::size_t g = 0; g < size(); ++g) acc += std::norm(psi[g]) * field[g];
    return acc * (h_ * h_);
}

double QuantumModel::expectation_applied(const CField& psi, const CField& op_psi) const {
    return inner(psi, op_psi).real();
}

double QuantumModel::hermiticity_defect(const std::function<CField(const CField&)>& op,
                                        const CField& a, const CField& b) const {
    const CField oa = op(a);
    const CField ob = op(b);
    const cdouble lhs = inner(a, ob);
    const cdouble rhs = inner(oa, b);
    const double scale = std::max(norm(oa) * norm(b), 1e-300);
    return std::abs(lhs - rhs) / scale;
}

double QuantumModel::linearity_defect(const std::function<CField(const CField&)>& op,
                                      const CField& a, const CField& b, cdouble alpha,
                                      cdouble beta) const {
    CField combo(size());
    for (std::size_t g = 0; g < size(); ++g) combo[g] = alpha * a[g] + beta * b[g];
    const CField oc = op(combo);
    const CField oa = op(a);
    const CField ob = op(b);
    CField diff(size());
    for (std::size_t g = 0; g < size(); ++g) diff[g] = oc[g] - alpha * oa[g] - beta * ob[g];
    const double scale = std::max(std::abs(alpha) * norm(oa) + std::abs(beta) * norm(ob), 1e-300);
    return norm(diff) / scale;
}

double QuantumModel::interior_norm(const CField& f, int margin_cells) const {
    if (f.size() != size()) throw InvalidState("field size mismatch");
    const int n = cfg_.n;
    if (margin_cells < 0 || 2 * margin_cells >= n) throw InvalidState("margin leaves no interior");
    double acc = 0.0;
    for (int ix = margin_cells; ix < n - margin_cells; ++ix)
        for (int iy = margin_cells; iy < n - margin_cells; ++iy)
            acc += std::norm(f[static_cast<std::size_t>(ix) * n + iy]);
    return std::sqrt(acc * h_ * h_);
}

RField QuantumModel::cm_position_field(int j, int s) const {
    const RField& r = s == 0 ? rx_ : ry_;
    RField out(size());
    const double Wj = cm_weight(j);
    for (std::size_t g = 0; g < size(); ++g) out[g] = Wj * r[g];
    return out;
}

RField QuantumModel::rotational_coupling_field(int j, int k, int i, int nn) const {
    RField out(size(), 0.0);
    const double mi = mass(i);
    for (int l = 0; l < 2; ++l) {
        const double c1 = eps3(nn, l, 2);
        if (c1 == 0.0) continue;
        const RField& rl = l == 0 ? rx_ : ry_;
        for (int s = 0; s < 2; ++s) {
            const double c2 = eps3(2, s, k);
            if (c2 == 0.0) continue;
            const RField& rs = s == 0 ? rx_ : ry_;
            const double coef = mi * c1 * c2 * cm_weight(j) * cm_weight(i);
            for (std::size_t g = 0; g < size(); ++g) out[g] += coef * beta_[g] * rs[g] * rl[g];
        }
    }
    return out;
}

double QuantumModel::commutator_x_P_residual(const CField& psi, int j, int k, int i, int nn,
                                             bool cm_constrained, int margin_cells) const {
    const RField xf = cm_position_field(j, k);
    CField xpsi(size());
    for (std::size_t g = 0; g < size(); ++g) xpsi[g] = xf[g] * psi[g];
    const CField P_psi = canonical_momentum(psi, i, nn);
    const CField P_xpsi = canonical_momentum(xpsi, i, nn);

    double dcoef = 0.0;
    if (k == nn) dcoef = cm_constrained ? cm_weight(j) * grad_sign(i) : (i == j ? 1.0 : 0.0);
    const RField mach = rotational_coupling_field(j, k, i, nn);

    CField diff(size());
    const cdouble ih = cdouble(0.0, cfg_.hbar);
    for (std::size_t g = 0; g < size(); ++g) {
        const cdouble lhs = xf[g] * P_psi[g] - P_xpsi[g];
        const cdouble rhs = ih * (dcoef + mach[g]) * psi[g];
        diff[g] = lhs - rhs;
    }
    return interior_norm(diff, margin_cells) / cfg_.hbar;
}

double QuantumModel::commutator_x_p_residual(const CField& psi, int j, int k, int i, int nn,
                                             int margin_cells) const {
    const RField xf = cm_position_field(j, k);
    CField xpsi(size());
    for (std::size_t g = 0; g < size(); ++g) xpsi[g] = xf[g] * psi[g];
    const CField p_psi = momentum(psi, i, nn);
    const CField p_xpsi = momentum(xpsi, i, nn);
    const double dcoef = k == nn ? cm_weight(j) * grad_sign(i) : 0.0;
    CField diff(size());
    const cdouble ih = cdouble(0.0, cfg_.hbar);
    for (std::size_t g = 0; g < size(); ++g)
        diff[g] = (xf[g] * p_psi[g] - p_xpsi[g]) - ih * dcoef * psi[g];
    return interior_norm(diff, margin_cells) / cfg_.hbar;
}

double QuantumModel::commutator_p_P_residual(const CField& psi, int j, int k, int i, int nn,
                                             bool cm_constrained, int margin_cells) const {
    const CField P_psi = canonical_momentum(psi, i, nn);
    const CField p_psi = momentum(psi, j, k);
    const CField lhs_a = momentum(P_psi, j, k);
    const CField lhs_b = canonical_momentum(p_psi, i, nn);

    const std::size_t sz = size();
    const double mi = mass(i);
    CField acc(sz);

    if (cm_constrained) {
        // First-order coupling with the reduced-grid coefficient derivatives
        // kept exactly; derivatives of the inverse inertia dropped.
        const CField dpsi0 = d1(psi, 0);
        const CField dpsi1 = d1(psi, 1);
        const double Tj = grad_sign(j);
        for (int l = 0; l < 2; ++l) {
            const double c1 = eps3(nn, l, 2);
            if (c1 == 0.0) continue;
            const RField& rl = l == 0 ? rx_ : ry_;
            const double Wi = cm_weight(i);

            CField wpsi(sz), bpsi(sz);
            for (std::size_t g = 0; g < sz; ++g) {
                wpsi[g] = Wi * rl[g] * beta_[g] * psi[g];
                bpsi[g] = beta_[g] * psi[g];
            }
            const CField dwpsi0 = d1(wpsi, 0);
            const CField dwpsi1 = d1(wpsi, 1);
            const CField dbpsi0 = d1(bpsi, 0);
            const CField dbpsi1 = d1(bpsi, 1);

            for (int s = 0; s < 2; ++s) {
                for (int b = 0; b < 2; ++b) {
                    const double c2 = eps3(2, s, b);
                    if (c2 == 0.0) continue;
                    const RField& rs = s == 0 ? rx_ : ry_;
                    const CField& dpsib = b == 0 ? dpsi0 : dpsi1;
                    const CField& dwpsib = b == 0 ? dwpsi0 : dwpsi1;
                    const CField& dbpsib = b == 0 ? dbpsi0 : dbpsi1;
                    for (int jp = 0; jp < 2; ++jp) {
                        const cdouble pjp = cdouble(0.0, -cfg_.hbar * grad_sign(jp));
                        if (s == k) {
                            const double coef = c1 * c2 * Tj * cm_weight(jp);
                            for (std::size_t g = 0; g < sz; ++g)
                                acc[g] += coef * (Wi * rl[g] * beta_[g] * (pjp * dpsib[g]) +
                                                  pjp * dwpsib[g]);
                        }
                        if (l == k) {
                            const double coef = c1 * c2 * Tj * cm_weight(i) * cm_weight(jp);
                            for (std::size_t g = 0; g < sz; ++g)
                                acc[g] += coef * rs[g] *
                                          (beta_[g] * (pjp * dpsib[g]) + pjp * dbpsib[g]);
                        }
                    }
                }
            }
        }
    } else {
        // Naive reading: canonical deltas, coefficients untouched by the
        // CM-constraint projector.
        const CField dpsi0 = d1(psi, 0);
        const CField dpsi1 = d1(psi, 1);
        for (int l = 0; l < 2; ++l) {
            const double c1 = eps3(nn, l, 2);
            if (c1 == 0.0) continue;
            const RField& rl = l == 0 ? rx_ : ry_;
            const double Wi = cm_weight(i);
            CField wpsi(sz);
            for (std::size_t g = 0; g < sz; ++g) wpsi[g] = beta_[g] * Wi * rl[g] * psi[g];
            const CField dwpsi0 = d1(wpsi, 0);
            const CField dwpsi1 = d1(wpsi, 1);
            for (int b = 0; b < 2; ++b) {
                const double c2 = eps3(2, k, b);
                if (c2 == 0.0) continue;
                const cdouble pj = cdouble(0.0, -cfg_.hbar * grad_sign(j));
                const CField& dpsib = b == 0 ? dpsi0 : dpsi1;
                const CField& dwpsib = b == 0 ? dwpsi0 : dwpsi1;
                for (std::size_t g = 0; g < sz; ++g)
                    acc[g] += c1 * c2 * (beta_[g] * Wi * rl[g] * (pj * dpsib[g]) + pj * dwpsib[g]);
            }
        }
        if (i == j) {
            const double c1 = eps3(nn, k, 2);
            if (c1 != 0.0) {
                for (int b = 0; b < 2; ++b) {
                    for (int s = 0; s < 2; ++s) {
                        const double c2 = eps3(2, s, b);
                        if (c2 == 0.0) continue;
                        const RField& rs = s == 0 ? rx_ : ry_;
                        const CField& dpsib = b == 0 ? dpsi0 : dpsi1;
                        for (int jp = 0; jp < 2; ++jp) {
                            const double coef = 2.0 * c1 * c2 * cm_weight(jp);
                            const cdouble pjp = cdouble(0.0, -cfg_.hbar * grad_sign(jp));
                            for (std::size_t g = 0; g < sz; ++g)
                                acc[g] += coef * beta_[g] * rs[g] * (pjp * dpsib[g]);
                        }
                    }
                }
            }
        }
    }

    CField diff(sz);
    const cdouble front = cdouble(0.0, -0.5 * cfg_.hbar * mi);
    for (std::size_t g = 0; g < sz; ++g) diff[g] = (lhs_a[g] - lhs_b[g]) - front * acc[g];
    const double pn = interior_norm(p_psi, margin_cells);
    return interior_norm(diff, margin_cells) / std::max(cfg_.hbar * pn, 1e-300);
}

double QuantumModel::mode_difference(const CField& psi) const {
    const CField hc = hamiltonian(psi, HamiltonianMode::Composed);
    const CField ht = hamiltonian(psi, HamiltonianMode::Truncated);
    CField diff(size());
    for (std::size_t g = 0; g < size(); ++g) diff[g] = hc[g] - ht[g];
    const double denom = norm(hc);
    if (denom <= 0.0) throw InvalidState("composed application vanished");
    if (!finite_field(diff)) throw InvalidState("non-finite operator application");
    return norm(diff) / denom;
}

}  // namespace relmech
