#include "relmech/suite.hpp"

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "relmech/bucket.hpp"
#include "relmech/csvio.hpp"
#include "relmech/dynamics.hpp"
#include "relmech/errors.hpp"
#include "relmech/gauge.hpp"
#include "relmech/qevolve.hpp"
#include "relmech/quantum.hpp"
#include "relmech/relational.hpp"
#include "relmech/rng.hpp"

namespace relmech {
namespace {

double sdev(double a, double b, double floor = 1.0) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

double vdev(const Vec3& a, const Vec3& b, double floor = 1.0) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

double mdev(const Mat3& a, const Mat3& b, double floor = 1.0) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

std::string fmt_note(const char* pattern, double x) {
    char buf[96];
    std::snprintf(buf, sizeof buf, pattern, x);
    return buf;
}

// Battery state: N bodies, masses in [0.1, 10], components in [-10, 10].
SystemState battery_state(Rng& rng, int n_bodies) {
    SystemState s;
    for (int i = 0; i < n_bodies; ++i) {
        Body b;
        b.mass = rng.uniform(0.1, 10.0);
        b.label = "b" + std::to_string(i);
        s.bodies.push_back(b);
        s.positions.emplace_back(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0),
                                 rng.uniform(-10.0, 10.0));
        s.velocities.emplace_back(rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0),
                                  rng.uniform(-10.0, 10.0));
    }
    return s;
}

struct Collector {
    std::vector<PropertyResult> out;

    void add(std::string name, bool pass, double value, double bound, std::string note = "") {
        PropertyResult r;
        r.name = std::move(name);
        r.pass = pass;
        r.value = value;
        r.bound = bound;
        r.note = std::move(note);
        out.push_back(std::move(r));
    }
};

// ---------------------------------------------------------------- relational

void check_relational_battery(Collector& c, std::uint64_t seed) {
    Rng rng(seed);
    const PairPotential grav = PairPotential::gravity(1.0);
    double worst_form = 0.0, worst_constraint = 0.0, worst_order = 0.0;

    for (int rep = 0; rep < 10000; ++rep) {
        const int n = 2 + rng.uniform_int(0, 6);
        const SystemState s = battery_state(rng, n);

        // every quantity with more than one evaluation route
        worst_form = std::max(worst_form,
                              sdev(kinetic_energy(s, KineticLevel::Cm, KineticForm::Direct),
                                   kinetic_energy(s, KineticLevel::Cm, KineticForm::Pairwise)));
        const Vec3 j1 = angular_momentum(s, JForm::AbsoluteMinusCm);
        const Vec3 j2 = angular_momentum(s, JForm::CmRelative);
        const Vec3 j3 = angular_momentum(s, JForm::Pairwise);
        worst_form = std::max({worst_form, vdev(j1, j2), vdev(j2, j3)});
        const Mat3 i1 = inertia_tensor(s, InertiaForm::SingleBody);
        const Mat3 i2 = inertia_tensor(s, InertiaForm::Pairwise);
        worst_form = std::max(worst_form, mdev(i1, i2));
        const auto [x_c, u_c] = center_of_mass(s);
        const Mat3 shift =
            s.total_mass() * (x_c.squaredNorm() * Mat3::Identity() - x_c * x_c.transpose());
        worst_form = std::max(worst_form, mdev(absolute_inertia_tensor(s), Mat3(i1 + shift)));
        worst_form = std::max(worst_form, sdev(lagrangian(s, grav, LagrangianForm::Relational),
                                               lagrangian(s, grav, LagrangianForm::CmDecomposed)));

        // exchange-momentum sums close
        const auto [sum_p, sum_moment] = constraint_residuals(s);
        const auto P = canonical_momenta(s);
        double p_scale = 0.0, m_scale = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            p_scale += P[i].norm();
            m_scale += P[i].norm() * (s.positions[i] - x_c).norm();
        }
        worst_constraint = std::max(worst_constraint, sum_p.norm() / std::max(p_scale, 1e-12));
        worst_constraint =
            std::max(worst_constraint, sum_moment.norm() / std::max(m_scale, 1e-12));

        // 0 <= relational <= frame-relative <= absolute kinetic energy
        const double t_abs = kinetic_energy(s, KineticLevel::Absolute);
        const double t_cm = kinetic_energy(s, KineticLevel::Cm);
        const double t_rel = kinetic_energy(s, KineticLevel::Relational);
        const double viol = std::max({-t_rel, t_rel - t_cm, t_cm - t_abs});
        worst_order = std::max(worst_order, viol / std::max(t_abs, 1.0));
    }
    c.add("relational/form-equivalence", worst_form <= 1e-11, worst_form, 1e-11,
          "10000 states, 2-8 bodies");
    c.add("relational/constraint-closure", worst_constraint <= 1e-11, worst_constraint, 1e-11);
    c.add("relational/energy-ordering", worst_order <= 1e-11, worst_order, 1e-11);
}

void check_relational_symmetries(Collector& c, std::uint64_t seed) {
    Rng rng(seed + 1);
    const PairPotential grav = PairPotential::gravity(1.0);

    double worst_shift = 0.0;
    for (int rep = 0; rep < 300; ++rep) {
        const SystemState s = battery_state(rng, 5);
        SystemState moved = s;
        const Vec3 off(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        const Vec3 boost(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        for (auto& x : moved.positions) x += off;
        for (auto& v : moved.velocities) v += boost;
        worst_shift = std::max(
            {worst_shift,
             sdev(kinetic_energy(s, KineticLevel::Cm), kinetic_energy(moved, KineticLevel::Cm)),
             sdev(kinetic_energy(s, KineticLevel::Relational),
                  kinetic_energy(moved, KineticLevel::Relational), 1e-3),
             vdev(angular_momentum(s), angular_momentum(moved)),
             mdev(inertia_tensor(s), inertia_tensor(moved)),
             vdev(omega(s), omega(moved), 1e-3), sdev(lagrangian(s, grav), lagrangian(moved, grav)),
             sdev(hamiltonian(s, grav), hamiltonian(moved, grav))});
    }
    c.add("relational/frame-shift-invariance", worst_shift <= 1e-11, worst_shift, 1e-11,
          "300 translated and boosted states");

    double worst_rot = 0.0;
    for (int rep = 0; rep < 300; ++rep) {
        const SystemState s = battery_state(rng, 5);
        const Vec3 axis = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
        const Mat3 R = Eigen::AngleAxisd(rng.uniform(0.0, 3.0), axis).toRotationMatrix();
        SystemState rot = s;
        for (auto& x : rot.positions) x = R * x;
        for (auto& v : rot.velocities) v = R * v;
        worst_rot = std::max({worst_rot,
                              sdev(kinetic_energy(s, KineticLevel::Relational),
                                   kinetic_energy(rot, KineticLevel::Relational), 1e-3),
                              sdev(hamiltonian(s, grav), hamiltonian(rot, grav)),
                              vdev(angular_momentum(rot), Vec3(R * angular_momentum(s))),
                              vdev(omega(rot), Vec3(R * omega(s)), 1e-3),
                              mdev(inertia_tensor(rot), Mat3(R * inertia_tensor(s) * R.transpose()))});
    }
    c.add("relational/rotation-covariance", worst_rot <= 1e-11, worst_rot, 1e-11,
          "scalars invariant, J and inertia covariant");

    double worst_rigid = 0.0;
    for (int rep = 0; rep < 300; ++rep) {
        SystemState s = battery_state(rng, 5);
        const Vec3 w(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        const Vec3 boost(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
        const auto [x_c, u_c] = center_of_mass(s);
        for (std::size_t i = 0; i < s.size(); ++i)
            s.velocities[i] = boost + w.cross(Vec3(s.positions[i] - x_c));
        const double t_cm = kinetic_energy(s, KineticLevel::Cm);
        const double t_rel = kinetic_energy(s, KineticLevel::Relational);
        worst_rigid = std::max(worst_rigid, std::abs(t_rel) / std::max(t_cm, 1.0));
    }
    c.add("relational/rigid-motion-null", worst_rigid <= 1e-11, worst_rigid, 1e-11,
          "shared rotation plus boost carries no internal energy");
}

// ------------------------------------------------------------------ dynamics

void check_gauge_scalars(Collector& c, std::uint64_t seed) {
    Rng rng(seed + 2);
    SystemState s0 = battery_state(rng, 3);
    for (auto& x : s0.positions) x *= 0.2;
    for (auto& v : s0.velocities) v *= 0.05;
    const PairPotential pot = PairPotential::harmonic(0.8);
    const Trajectory traj = integrate_newtonian_gauge(s0, pot, 1e-2, 200);

    double worst = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        const GaugePath g = GaugePath::random(rng, 0.7);
        const Trajectory dressed = apply_gauge(traj, g);
        for (std::size_t k = 0; k < traj.size(); k += 20) {
            const SystemState& a = traj.samples[k];
            const SystemState& b = dressed.samples[k];
            worst = std::max({worst,
                              sdev(kinetic_energy(a, KineticLevel::Relational),
                                   kinetic_energy(b, KineticLevel::Relational), 1e-6),
                              sdev(lagrangian(a, pot), lagrangian(b, pot), 1e-6),
                              sdev(hamiltonian(a, pot), hamiltonian(b, pot), 1e-6)});
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = i + 1; j < a.size(); ++j)
                    worst = std::max(worst, sdev((a.positions[i] - a.positions[j]).norm(),
                                                 (b.positions[i] - b.positions[j]).norm(), 1e-9));
        }
    }
    c.add("dynamics/gauge-invariant-scalars", worst <= 1e-9, worst, 1e-9,
          "5 random dressings of a harmonic trajectory");
}

void check_eom_residual(Collector& c) {
    const SystemState s0 = make_state({1.0, 1.0}, {Vec3(0.5, 0, 0), Vec3(-0.5, 0, 0)},
                                      {Vec3::Zero(), Vec3::Zero()});
    const PairPotential pot = PairPotential::harmonic(1.0);
    GaugePath g;
    g.axis = Vec3(0.2, -0.3, 1.0);
    g.b1 = 0.4;
    g.amp_r = 0.3;
    g.w_r = 0.9;
    g.amp_t = Vec3(0.2, 0.1, -0.15);
    g.w_t = 1.1;
    g.a1 = Vec3(0.05, -0.02, 0.04);

    const auto residual_at = [&](double dt) {
        const int steps = static_cast<int>(1.0 / dt);
        const Trajectory traj = integrate_newtonian_gauge(s0, pot, dt, steps);
        const Trajectory dressed = apply_gauge(traj, g);
        return eom_residual(dressed, pot, steps / 2).max_norm;
    };
    const double r1 = residual_at(1e-3);
    const double r2 = residual_at(5e-4);
    const double order = std::log2(r1 / r2);
    c.add("dynamics/eom-residual", r1 <= 1e-6, r1, 1e-6, "dressed harmonic pair, dt=1e-3");
    c.add("dynamics/eom-convergence-order", order >= 1.8, order, 1.8,
          "halving dt; expected near 2");

    // a corrupted sample must light up against the force law
    const Trajectory traj = integrate_newtonian_gauge(s0, pot, 1e-3, 1000);
    GaugePath soft;
    soft.b1 = 0.3;
    soft.amp_t = Vec3(0.1, 0.2, 0.0);
    soft.w_t = 1.3;
    const Trajectory dressed = apply_gauge(traj, soft);
    const double clean = eom_residual(dressed, pot, 500).max_norm;
    Trajectory corrupted = dressed;
    corrupted.samples[500].velocities[0] *= 1.01;
    const double dirty = eom_residual(corrupted, pot, 500).max_norm;
    const double ratio = dirty / std::max(clean, 1e-300);
    c.add("dynamics/gauge-residual-contrast", ratio >= 1e3, ratio, 1e3,
          "1 percent velocity corruption at one sample");
}

void check_conservation(Collector& c, std::uint64_t seed) {
    Rng rng(seed + 3);
    SystemState s0 = battery_state(rng, 4);
    for (auto& x : s0.positions) x *= 0.3;
    for (auto& v : s0.velocities) v *= 0.1;
    const Trajectory traj = integrate_newtonian_gauge(s0, PairPotential::harmonic(0.5), 1e-3, 2000);
    double scale = 0.0;
    for (std::size_t i = 0; i < s0.size(); ++i)
        scale += s0.bodies[i].mass * s0.positions[i].norm() * (s0.velocities[i].norm() + 1.0);
    double worst_j = 0.0;
    for (const SystemState& s : traj.samples)
        worst_j = std::max(worst_j, angular_momentum(s).norm() / scale);
    c.add("dynamics/angular-momentum-pinned", worst_j <= 1e-10, worst_j, 1e-10,
          "stays at zero along the evolving-frame trajectory");

    SystemState r0 = battery_state(rng, 3);
    for (auto& x : r0.positions) x *= 0.3;
    for (auto& v : r0.velocities) v *= 0.1;
    const PairPotential pot = PairPotential::harmonic(1.0);
    const Trajectory fwd = integrate_newtonian_gauge(r0, pot, 1e-3, 1000);
    SystemState turn = fwd.samples.back();
    for (auto& v : turn.velocities) v = -v;
    const Trajectory back = integrate_newtonian_gauge(turn, pot, 1e-3, 1000);
    double worst_rev = 0.0;
    const SystemState& start = fwd.samples.front();
    const SystemState& end = back.samples.back();
    for (std::size_t i = 0; i < start.size(); ++i)
        for (std::size_t j = i + 1; j < start.size(); ++j)
            worst_rev = std::max(worst_rev, vdev(Vec3(start.positions[i] - start.positions[j]),
                                                 Vec3(end.positions[i] - end.positions[j])));
    c.add("dynamics/time-reversal", worst_rev <= 1e-8, worst_rev, 1e-8,
          "velocity flip retraces all separations");
}

// -------------------------------------------------------------------- bucket

void check_bucket_analytics(Collector& c) {
    const double inf = std::numeric_limits<double>::infinity();
    BucketConfig ref;  // m = R = G = 1, shell inertia 100

    BucketConfig rigid = ref;
    rigid.I0_infinite = true;
    const double g_inf = g_eff(rigid);
    const BucketBalance bal_inf = bucket_balance(rigid);

    BucketConfig heavy = ref;
    heavy.I0 = 1e12;
    const double g_heavy = g_eff(heavy);

    const BucketBalance bal = bucket_balance(ref);
    const double worst =
        std::max({std::abs(g_inf - ref.G) / ref.G, sdev(g_eff(ref), 1.0404),
                  sdev(bal.Omega_b / bal.Omega, 1.02), std::abs(g_heavy - ref.G) / ref.G,
                  sdev(bal_inf.Omega_b, bal_inf.Omega)});
    c.add("bucket/analytic-limits", worst <= 1e-11, worst, 1e-11,
          "rigid-background limit and the 2 percent reference point");

    const std::vector<double> ladder = {10.0, 100.0, 1000.0, inf};
    const auto rows = bucket_sweep(ref, ladder);
    double min_drop = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < rows.size(); ++i)
        min_drop = std::min(min_drop, rows[i].G_eff - rows[i + 1].G_eff);
    const bool newtonian_end = rows.back().G_eff == ref.G && sdev(rows.back().Omega_b, rows.back().Omega) <= 1e-15;
    c.add("bucket/sweep-monotone", min_drop > 0.0 && newtonian_end, min_drop, 0.0,
          "coupling falls toward the bare constant as shell inertia grows");

    BucketConfig heavier = ref;
    heavier.m = 2.0;
    const double gain = g_eff(heavier) - g_eff(ref);
    c.add("bucket/mass-raises-coupling", gain > 0.0, gain, 0.0,
          "effective coupling grows with the orbiting mass");
}

void check_bucket_simulation(Collector& c) {
    BucketConfig cfg;
    RingSimConfig near_ring;
    near_ring.R_s = 50.0;
    near_ring.n_shell = 16;
    near_ring.steps = 12600;
    const double err_near = bucket_simulation(cfg, near_ring).relative_error;

    RingSimConfig far_ring = near_ring;
    far_ring.R_s = 100.0;
    far_ring.n_shell = 32;
    const double err_far = bucket_simulation(cfg, far_ring).relative_error;

    c.add("bucket/simulation-tracks-analytic", err_far < err_near && err_far <= 1e-2, err_far,
          1e-2, fmt_note("next-coarser ring error %.3e", err_near));
}

// ------------------------------------------------------------------- quantum

void check_operator_battery(Collector& c, std::uint64_t seed) {
    QuantumConfig cfg;
    cfg.n = 128;
    cfg.half_width = 3.2;
    QuantumModel m(cfg);
    Rng rng(seed + 4);
    double worst_sym = 0.0, worst_naive = 0.0, worst_lin = 0.0, worst_canonical = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = m.gaussian_packet(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                         rng.uniform(0.35, 0.5), rng.uniform(-1.5, 1.5),
                                         rng.uniform(-1.5, 1.5));
        const auto b = m.gaussian_packet(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                         rng.uniform(0.35, 0.5), rng.uniform(-1.5, 1.5),
                                         rng.uniform(-1.5, 1.5));
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
                worst_sym = std::max(
                    worst_sym,
                    m.hermiticity_defect([&](const CField& f) { return m.momentum(f, i, k); },
                                         a.amplitudes, b.amplitudes));
                worst_canonical =
                    std::max(worst_canonical,
                             m.hermiticity_defect(
                                 [&](const CField& f) { return m.canonical_momentum(f, i, k); },
                                 a.amplitudes, b.amplitudes));
                worst_naive = std::max(
                    worst_naive,
                    m.hermiticity_defect(
                        [&](const CField& f) { return m.canonical_momentum_unsymmetrized(f, i, k); },
                        a.amplitudes, b.amplitudes));
            }
        worst_sym = std::max(
            worst_sym, m.hermiticity_defect([&](const CField& f) { return m.hamiltonian(f); },
                                            a.amplitudes, b.amplitudes));
        worst_lin = std::max(
            worst_lin, m.linearity_defect([&](const CField& f) { return m.hamiltonian(f); },
                                          a.amplitudes, b.amplitudes, cdouble(0.7, -0.3),
                                          cdouble(-0.2, 1.1)));
    }
    worst_sym = std::max(worst_sym, worst_canonical);
    const double contrast = worst_naive / std::max(worst_canonical, 1e-300);
    c.add("quantum/hermitian-operators", worst_sym <= 1e-9, worst_sym, 1e-9,
          "20 packet pairs; momenta and composed generator");
    c.add("quantum/ordering-contrast", contrast >= 1e6, contrast, 1e6,
          "one-sided coefficient ordering fails hermiticity");
    c.add("quantum/linearity", worst_lin <= 1e-12, worst_lin, 1e-12);
}

void check_unitarity(Collector& c, std::uint64_t seed) {
    QuantumConfig cfg;
    cfg.n = 128;
    cfg.half_width = 6.4;
    cfg.background_inertia = 1.0;
    QuantumModel m(cfg);
    const Wavefunction psi0 = m.gaussian_packet(1.2, 0.8, 0.8, 0.35, -0.25);
    EvolveOptions opts;
    opts.dt = 1e-3;
    opts.steps = 50;
    opts.solver_tol = 1e-10;
    opts.check_spectral_radius = false;
    opts.seed = seed;
    const EvolveResult res = evolve(m, psi0, opts);
    c.add("quantum/unitary-step-norm", res.max_norm_drift <= 1e-10, res.max_norm_drift, 1e-10,
          "50 implicit-midpoint steps with rotational coupling on");
}

void check_truncation_slope(Collector& c) {
    QuantumConfig base;
    base.n = 128;
    base.half_width = 3.2;
    QuantumModel probe_model(base);
    const auto psi = probe_model.gaussian_packet(0.8, -0.5, 0.45, 1.0, -0.7);

    const double lams[4] = {1.0, 2.0, 4.0, 8.0};
    double vals[4];
    for (int q = 0; q < 4; ++q) {
        QuantumConfig cfg = base;
        cfg.background_inertia = 3.0 * lams[q] * lams[q];
        QuantumModel m(cfg);
        vals[q] = m.mode_difference(psi.amplitudes);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int q = 1; q < 4; ++q) {
        const double x = std::log(lams[q]);
        const double y = std::log(vals[q]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
    c.add("quantum/truncation-slope", slope >= -4.5 && slope <= -3.5, slope, -3.5,
          "operating-mode gap vs inertia dilation; window [-4.5, -3.5]");
}

double schmidt_ratio(const CField& f, int n) {
    Eigen::MatrixXcd a(n, n);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy) a(ix, iy) = f[static_cast<std::size_t>(ix) * n + iy];
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    const auto& s = svd.singularValues();
    return s(1) / s(0);
}

void check_product_mixing(Collector& c) {
    QuantumConfig cfg;
    cfg.n = 128;
    cfg.half_width = 3.2;
    cfg.background_inertia = 1.0;
    QuantumModel m(cfg);
    const Wavefunction psi = m.gaussian_packet(0.6, -0.4, 0.5, 0.8, -0.6);
    const double in_ratio = schmidt_ratio(psi.amplitudes, cfg.n);
    const double out_ratio = schmidt_ratio(m.hamiltonian(psi.amplitudes), cfg.n);
    c.add("quantum/product-state-mixing",
          in_ratio <= 1e-10 && out_ratio >= 1e-6, out_ratio, 1e-6,
          fmt_note("axis-product input ratio %.3e", in_ratio));
}

void check_stiff_background_limit(Collector& c) {
    QuantumConfig cfg;
    cfg.n = 64;
    cfg.half_width = 3.2;
    cfg.machian_terms = false;
    QuantumModel m(cfg);
    m.set_potential(PairPotential::harmonic(0.3));
    const Wavefunction psi = m.gaussian_packet(0.5, -0.3, 0.5, 0.9, -1.1);

    bool momenta_identical = true;
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            momenta_identical = momenta_identical &&
                                m.canonical_momentum(psi.amplitudes, i, k) ==
                                    m.momentum(psi.amplitudes, i, k);

    const CField h = m.hamiltonian(psi.amplitudes);
    CField ref(m.size(), cdouble(0.0, 0.0));
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k) {
            const CField pk = m.momentum(psi.amplitudes, i, k);
            const CField ppk = m.momentum(pk, i, k);
            const double inv2m = 1.0 / (2.0 * m.mass(i));
            for (std::size_t g = 0; g < m.size(); ++g) ref[g] += inv2m * ppk[g];
        }
    const RField& v = m.potential_field();
    for (std::size_t g = 0; g < m.size(); ++g) ref[g] += v[g] * psi.amplitudes[g];
    double num = 0.0, den = 0.0;
    for (std::size_t g = 0; g < m.size(); ++g) {
        num += std::norm(h[g] - ref[g]);
        den += std::norm(h[g]);
    }
    const double rel = std::sqrt(num / den);
    const double gap = m.mode_difference(psi.amplitudes);
    c.add("quantum/stiff-background-limit",
          momenta_identical && rel <= 1e-13 && gap <= 1e-15, rel, 1e-13,
          fmt_note("textbook kinetic form recovered; mode gap %.1e", gap));
}

// -------------------------------------------------------------- determinism

std::string determinism_document() {
    std::ostringstream out;

    const SystemState s0 = make_state({1.0, 1.0}, {Vec3(1, 0, 0), Vec3(-1, 0, 0)},
                                      {Vec3(0, 0.5, 0), Vec3(0, -0.5, 0)});
    const Trajectory traj =
        integrate_newtonian_gauge(s0, PairPotential::gravity(1.0), 1e-3, 100);
    write_trajectory_csv(out, traj);
    write_trajectory_jsonl(out, traj);

    BucketConfig bucket;
    write_bucket_sweep_csv(
        out, bucket_sweep(bucket, {10.0, 100.0, std::numeric_limits<double>::infinity()}));

    QuantumConfig qc;
    qc.n = 32;
    qc.half_width = 3.2;
    qc.background_inertia = 0.5;
    QuantumModel m(qc);
    Wavefunction psi = m.gaussian_packet(0.4, -0.2, 0.45, 0.6, -0.4);
    std::vector<ExpectationRow> rows;
    rows.push_back(expectation_row(m, psi, HamiltonianMode::Composed));
    for (int s = 0; s < 3; ++s) {
        crank_nicolson_step(m, psi.amplitudes, 1e-3, HamiltonianMode::Composed, 1e-10, 500);
        psi.time += 1e-3;
        rows.push_back(expectation_row(m, psi, HamiltonianMode::Composed));
    }
    write_expectation_csv(out, rows);
    return out.str();
}

void check_determinism(Collector& c) {
    const std::string first = determinism_document();
    const std::string second = determinism_document();
    const bool same = first == second;
    c.add("output/determinism", same, same ? 0.0 : 1.0, 0.0,
          "repeated pipeline runs serialize to identical bytes");
}

}  // namespace

std::vector<PropertyResult> run_invariant_suite(std::uint64_t seed) {
    Collector c;
    check_relational_battery(c, seed);
    check_relational_symmetries(c, seed);
    check_gauge_scalars(c, seed);
    check_eom_residual(c);
    check_conservation(c, seed);
    check_bucket_analytics(c);
    check_bucket_simulation(c);
    check_operator_battery(c, seed);
    check_unitarity(c, seed);
    check_truncation_slope(c);
    check_product_mixing(c);
    check_stiff_background_limit(c);
    check_determinism(c);
    return std::move(c.out);
}

std::vector<PropertyResult> run_quantum_checks(std::uint64_t seed) {
    Collector c;
    check_operator_battery(c, seed);

    {
        QuantumConfig cfg;
        cfg.n = 768;
        cfg.half_width = 19.2;
        QuantumModel m(cfg);
        const auto psi = m.gaussian_packet(1.0, -1.0, 3.5, 0.15, 0.10);
        double worst = 0.0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int nn = 0; nn < 2; ++nn)
                        worst = std::max(
                            worst, m.commutator_x_p_residual(psi.amplitudes, j, k, i, nn, 40));
        c.add("quantum/position-momentum-bracket", worst <= 1e-8, worst, 1e-8,
              "all 16 index combinations on the fine wide grid");
    }

    {
        QuantumConfig cfg;
        cfg.n = 400;
        cfg.half_width = 10.0;
        cfg.m1 = 1.0;
        cfg.m2 = 1.5;
        cfg.background_inertia = 1.0;
        QuantumModel m(cfg);
        const auto psi = m.gaussian_packet(2.0, 0.0, 1.6, 0.15, -0.1);
        const int combos[6][4] = {{0, 0, 0, 0}, {0, 0, 1, 1}, {1, 1, 0, 0},
                                  {0, 1, 1, 0}, {0, 1, 0, 0}, {1, 0, 1, 1}};
        double worst = 0.0;
        for (const auto& cb : combos)
            worst = std::max(worst, m.commutator_x_P_residual(psi.amplitudes, cb[0], cb[1], cb[2],
                                                              cb[3], true, 40));
        const double literal = m.commutator_x_P_residual(psi.amplitudes, 0, 0, 0, 0, false, 40);
        c.add("quantum/position-canonical-bracket", worst <= 1e-6, worst, 1e-6,
              "frame-projected coefficient closes the bracket");
        c.add("quantum/frame-weight-contrast", literal >= 0.1, literal, 0.1,
              "identity coefficient misses by the mass fraction");
    }

    {
        const auto residuals = [](double background) {
            QuantumConfig cfg;
            cfg.n = 400;
            cfg.half_width = 10.0;
            cfg.background_inertia = background;
            QuantumModel m(cfg);
            const auto psi = m.gaussian_packet(2.5, 0.0, 1.5, 0.4, 0.6);
            const double corrected =
                m.commutator_p_P_residual(psi.amplitudes, 0, 0, 0, 1, true, 40);
            const double literal =
                m.commutator_p_P_residual(psi.amplitudes, 0, 0, 0, 1, false, 40);
            return std::pair<double, double>(corrected, literal);
        };
        const auto [c_hi, l_hi] = residuals(1.6e4);
        const auto [c_lo, l_lo] = residuals(1e3);
        (void)l_lo;
        const double fall = c_lo / c_hi;
        c.add("quantum/momentum-canonical-bracket", c_hi <= 1e-6, c_hi, 1e-6,
              "first-order coupling formula closes the bracket");
        c.add("quantum/ordering-requirement", l_hi >= 100.0 * c_hi, l_hi / c_hi, 100.0,
              "unsymmetrized reading misses the bracket");
        c.add("quantum/coupling-inertia-scaling", fall >= 150.0 && fall <= 400.0, fall, 150.0,
              "16x inertia shrinks the residual ~256x; window [150, 400]");
    }

    check_truncation_slope(c);
    check_stiff_background_limit(c);
    return std::move(c.out);
}

bool all_pass(const std::vector<PropertyResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

void print_property_report(std::ostream& out, const std::vector<PropertyResult>& results) {
    int passed = 0;
    for (const auto& r : results) {
        char line[256];
        std::snprintf(line, sizeof line, "[%s] %-38s value=%.6e bound=%g", r.pass ? "PASS" : "FAIL",
                      r.name.c_str(), r.value, r.bound);
        out << line;
        if (!r.note.empty()) out << "  (" << r.note << ")";
        out << "\n";
        if (r.pass) ++passed;
    }
    out << "checks: " << results.size() << " total, " << passed << " passed, "
        << results.size() - passed << " failed\n";
}

namespace {
std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
}  // namespace

void write_property_csv(std::ostream& out, const std::vector<PropertyResult>& results) {
    out << "check,value,bound,pass\n";
    for (const auto& r : results)
        out << r.name << ',' << fmt17(r.value) << ',' << fmt17(r.bound) << ','
            << (r.pass ? 1 : 0) << '\n';
}

void write_property_csv(const std::string& path, const std::vector<PropertyResult>& results) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open output file: " + path);
    write_property_csv(f, results);
    f.flush();
    if (!f) throw Error("failed writing output file: " + path);
}

}  // namespace relmech
