#include "relmech/qevolve.hpp"

#include <cmath>
#include <cstdio>

namespace relmech {

namespace {

double dot_real(const CField& a, const CField& b) {
    double acc = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g)
        acc += a[g].real() * b[g].real() + a[g].imag() * b[g].imag();
    return acc;
}

double plain_norm(const CField& a) { return std::sqrt(dot_real(a, a)); }

bool finite_field(const CField& f) {
    for (const cdouble& v : f)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

}  // namespace

double spectral_radius_estimate(const QuantumModel& model, HamiltonianMode mode, int iterations,
                                std::uint64_t seed) {
    Rng rng(seed);
    CField g(model.size());
    for (cdouble& v : g) v = cdouble(rng.normal(), rng.normal());
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        const double nn = plain_norm(g);
        if (nn <= 0.0) return 0.0;
        for (cdouble& v : g) v /= nn;
        g = model.hamiltonian(g, mode);
        lambda = plain_norm(g);
    }
    return lambda;
}

int crank_nicolson_step(const QuantumModel& model, CField& psi, double dt, HamiltonianMode mode,
                        double tol, int cap) {
    const double alpha = dt / (2.0 * model.hbar());
    const cdouble ia(0.0, alpha);

    auto apply_fwd = [&](const CField& f) {  // (1 + i dt H / 2 hbar) f
        CField hf = model.hamiltonian(f, mode);
        for (std::size_t g = 0; g < f.size(); ++g) hf[g] = f[g] + ia * hf[g];
        return hf;
    };
    auto apply_adj = [&](const CField& f) {  // (1 - i dt H / 2 hbar) f, the adjoint
        CField hf = model.hamiltonian(f, mode);
        for (std::size_t g = 0; g < f.size(); ++g) hf[g] = f[g] - ia * hf[g];
        return hf;
    };

    // b = (1 - i dt H / 2 hbar) psi
    CField b = apply_adj(psi);
    const double bnorm = plain_norm(b);
    if (bnorm <= 0.0) return 0;

    // Normal-equation conjugate gradient, warm-started at psi.
    CField x = psi;
    CField r = apply_fwd(x);
    for (std::size_t g = 0; g < r.size(); ++g) r[g] = b[g] - r[g];
    CField s = apply_adj(r);
    CField p = s;
    double gamma = dot_real(s, s);

    for (int it = 1; it <= cap; ++it) {
        const CField Ap = apply_fwd(p);
        const double denom = dot_real(Ap, Ap);
        if (denom <= 0.0) break;
        const double step = gamma / denom;
        for (std::size_t g = 0; g < x.size(); ++g) {
            x[g] += step * p[g];
            r[g] -= step * Ap[g];
        }
        if (plain_norm(r) / bnorm < tol) {
            psi = std::move(x);
            return it;
        }
        s = apply_adj(r);
        const double g2 = dot_real(s, s);
        for (std::size_t g = 0; g < p.size(); ++g) p[g] = s[g] + (g2 / gamma) * p[g];
        gamma = g2;
    }
    char msg[96];
    std::snprintf(msg, sizeof msg, "implicit step failed to reach tolerance %g within %d iterations",
                  tol, cap);
    throw SolverDiverged(msg);
}

void rk4_step(const QuantumModel& model, CField& psi, double dt, HamiltonianMode mode) {
    const cdouble rate(0.0, -1.0 / model.hbar());  // d psi / dt = -i H psi / hbar
    const std::size_t sz = psi.size();
    auto deriv = [&](const CField& f) {
        CField hf = model.hamiltonian(f, mode);
        for (cdouble& v : hf) v *= rate;
        return hf;
    };
    const CField k1 = deriv(psi);
    CField tmp(sz);
    for (std::size_t g = 0; g < sz; ++g) tmp[g] = psi[g] + 0.5 * dt * k1[g];
    const CField k2 = deriv(tmp);
    for (std::size_t g = 0; g < sz; ++g) tmp[g] = psi[g] + 0.5 * dt * k2[g];
    const CField k3 = deriv(tmp);
    for (std::size_t g = 0; g < sz; ++g) tmp[g] = psi[g] + dt * k3[g];
    const CField k4 = deriv(tmp);
    for (std::size_t g = 0; g < sz; ++g)
        psi[g] += dt / 6.0 * (k1[g] + 2.0 * k2[g] + 2.0 * k3[g] + k4[g]);
    if (!finite_field(psi)) throw StepRejected("explicit step produced a non-finite amplitude");
}

EvolveResult evolve(const QuantumModel& model, const Wavefunction& psi0, const EvolveOptions& opts) {
    if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) throw InvalidState("dt must be positive");
    if (opts.steps < 0) throw InvalidState("steps must be non-negative");
    if (psi0.amplitudes.size() != model.size()) throw InvalidState("field size mismatch");

    EvolveResult res;
    res.psi = psi0;

    if (opts.check_spectral_radius) {
        res.spectral_radius = spectral_radius_estimate(model, opts.mode, 30, opts.seed);
        const double resolve = opts.dt * res.spectral_radius / model.hbar();
        if (resolve > 2.0)
            std::fprintf(stderr,
                         "[relmech] warning: dt * spectral radius / hbar = %.3g; the time step "
                         "under-resolves the fastest mode\n",
                         resolve);
    }

    const double norm0 = model.inner(res.psi.amplitudes, res.psi.amplitudes).real();
    double prev = norm0;
    for (int step = 0; step < opts.steps; ++step) {
        if (opts.propagator == Propagator::CrankNicolson) {
            const int it = crank_nicolson_step(model, res.psi.amplitudes, opts.dt, opts.mode,
                                               opts.solver_tol, opts.solver_cap);
            res.max_solver_iterations = std::max(res.max_solver_iterations, it);
        } else {
            rk4_step(model, res.psi.amplitudes, opts.dt, opts.mode);
        }
        res.psi.time += opts.dt;
        ++res.total_steps;

        const double nn = model.inner(res.psi.amplitudes, res.psi.amplitudes).real();
        if (!std::isfinite(nn)) throw StepRejected("norm became non-finite");
        res.max_norm_drift = std::max(res.max_norm_drift, std::abs(nn - norm0));
        if (std::abs(nn - prev) > opts.norm_warn_threshold) {
            ++res.norm_warnings;
            if (res.norm_warnings == 1)
                std::fprintf(stderr,
                             "[relmech] warning: step %d changed the squared norm by %.3g "
                             "(threshold %.3g)\n",
                             step + 1, std::abs(nn - prev), opts.norm_warn_threshold);
        }
        prev = nn;
        if (opts.record_every > 0 && (step + 1) % opts.record_every == 0)
            res.recorded_norms.push_back(nn);
    }
    return res;
}

GroundStateResult imaginary_time_ground_state(const QuantumModel& model, const Wavefunction& psi0,
                                              double dtau, int steps, HamiltonianMode mode) {
    if (!(dtau > 0.0)) throw InvalidState("dtau must be positive");
    if (psi0.amplitudes.size() != model.size()) throw InvalidState("field size mismatch");
    GroundStateResult res;
    res.psi = psi0;
    CField& psi = res.psi.amplitudes;
    model.normalize(psi);

    const std::size_t sz = psi.size();
    auto deriv = [&](const CField& f) {  // d psi / d tau = -H psi / hbar
        CField hf = model.hamiltonian(f, mode);
        const double rate = -1.0 / model.hbar();
        for (cdouble& v : hf) v *= rate;
        return hf;
    };

    double prev_energy = 0.0;
    bool have_prev = false;
    CField tmp(sz);
    for (int step = 0; step < steps; ++step) {
        const CField k1 = deriv(psi);
        for (std::size_t g = 0; g < sz; ++g) tmp[g] = psi[g] + 0.5 * dtau * k1[g];
        const CField k2 = deriv(tmp);
        for (std::size_t g = 0; g < sz; ++g) tmp[g] = psi[g] + 0.5 * dtau * k2[g];
        const CField k3 = deriv(tmp);
        for (std::size_t g = 0; g < sz; ++g) tmp[g] = psi[g] + dtau * k3[g];
        const CField k4 = deriv(tmp);
        for (std::size_t g = 0; g < sz; ++g)
            psi[g] += dtau / 6.0 * (k1[g] + 2.0 * k2[g] + 2.0 * k3[g] + k4[g]);
        if (!finite_field(psi)) throw StepRejected("relaxation produced a non-finite amplitude");
        model.normalize(psi);
        ++res.steps;
        if ((step + 1) % 200 == 0 || step + 1 == steps) {
            const double e = model.expectation_applied(psi, model.hamiltonian(psi, mode));
            if (have_prev) res.energy_drift = std::abs(e - prev_energy);
            prev_energy = e;
            have_prev = true;
        }
    }
    res.energy = model.expectation_applied(psi, model.hamiltonian(psi, mode));
    return res;
}

EhrenfestReport ehrenfest_check(const QuantumModel& model, const Wavefunction& psi0, double dt,
                                int steps, int j, int k, HamiltonianMode mode, double solver_tol) {
    if (steps < 4) throw InvalidState("expectation-evolution check needs at least 4 steps");
    std::vector<CField> snaps;
    snaps.reserve(steps + 1);
    snaps.push_back(psi0.amplitudes);
    CField psi = psi0.amplitudes;
    for (int step = 0; step < steps; ++step) {
        crank_nicolson_step(model, psi, dt, mode, solver_tol, 500);
        snaps.push_back(psi);
    }

    const RField xjk = model.cm_position_field(j, k);
    std::vector<double> xser(snaps.size());
    for (std::size_t t = 0; t < snaps.size(); ++t) xser[t] = model.expectation_field(snaps[t], xjk);

    RField G[2][2];
    for (int i = 0; i < 2; ++i)
        for (int nn = 0; nn < 2; ++nn) G[i][nn] = model.rotational_coupling_field(j, k, i, nn);

    EhrenfestReport rep;
    for (int idx = 2; idx <= steps - 2; ++idx) {
        const CField& ps = snaps[idx];
        const double dxdt = (xser[idx + 1] - xser[idx - 1]) / (2.0 * dt);

        const double v_canon =
            model.expectation_applied(ps, model.canonical_momentum(ps, j, k)) / model.mass(j);
        const double v_plain = model.expectation_applied(ps, model.momentum(ps, j, k)) / model.mass(j);

        double corr = 0.0;
        for (int i = 0; i < 2; ++i) {
            for (int nn = 0; nn < 2; ++nn) {
                const CField Pp = model.canonical_momentum(ps, i, nn);
                CField gp(ps.size()), gps(ps.size());
                for (std::size_t g = 0; g < ps.size(); ++g) {
                    gp[g] = G[i][nn][g] * Pp[g];
                    gps[g] = G[i][nn][g] * ps[g];
                }
                corr += 0.5 / model.mass(i) *
                        (model.inner(ps, gp).real() + model.inner(Pp, gps).real());
            }
        }

        rep.residual_full = std::max(rep.residual_full, std::abs(dxdt - (v_canon + corr)));
        rep.residual_canonical_only = std::max(rep.residual_canonical_only, std::abs(dxdt - v_canon));
        rep.residual_plain_momentum = std::max(rep.residual_plain_momentum, std::abs(dxdt - v_plain));
        ++rep.window;
    }
    return rep;
}

VelocityReport packet_velocity_check(const QuantumModel& model, const Wavefunction& psi0, double k0,
                                     double dt, int steps, double solver_tol) {
    VelocityReport rep;
    CField psi = psi0.amplitudes;
    const double x_start = model.expectation_position(psi, 0);
    for (int step = 0; step < steps; ++step)
        crank_nicolson_step(model, psi, dt, HamiltonianMode::Composed, solver_tol, 500);
    const double x_end = model.expectation_position(psi, 0);
    rep.measured = (x_end - x_start) / (steps * dt);
    rep.expected = model.hbar() * k0 / model.reduced_mass();
    rep.relative_error = std::abs(rep.measured - rep.expected) / std::abs(rep.expected);
    return rep;
}

}  // namespace relmech
