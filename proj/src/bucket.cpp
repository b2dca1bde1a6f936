#include "relmech/bucket.hpp"

#include <cmath>
#include <limits>

namespace relmech {

void BucketConfig::validate() const {
    if (!(m > 0.0) || !(R > 0.0) || !(G > 0.0))
        throw InvalidState("bucket: m, R, G must all be positive");
    if (!I0_infinite && I0 < 0.0) throw InvalidState("bucket: I0 must be >= 0");
}

double BucketConfig::kepler_frequency() const { return std::sqrt(G * m / (4.0 * R * R * R)); }

BucketBalance bucket_balance(const BucketConfig& cfg) {
    cfg.validate();
    const double w_n = cfg.kepler_frequency();
    BucketBalance out;
    if (cfg.I0_infinite) {
        out.Omega_b = w_n;
        out.Omega = w_n;
        return out;
    }
    if (cfg.I0 == 0.0) {
        // No shell inertia: nothing to push against, no finite co-orbit rate.
        out.Omega_b = std::numeric_limits<double>::infinity();
        out.Omega = w_n;  // limit of Omega_b * I0 / (I0 + 2 m R^2)
        out.finite_equilibrium = false;
        return out;
    }
    const double ratio = 2.0 * cfg.m * cfg.R * cfg.R / cfg.I0;
    out.Omega_b = (1.0 + ratio) * w_n;
    out.Omega = out.Omega_b * cfg.I0 / (cfg.I0 + 2.0 * cfg.m * cfg.R * cfg.R);
    return out;
}

double g_eff(const BucketConfig& cfg) {
    cfg.validate();
    if (cfg.I0_infinite) return cfg.G;
    if (!(cfg.I0 > 0.0)) throw InvalidState("g_eff requires I0 > 0 (or the infinite flag)");
    const double ratio = 2.0 * cfg.m * cfg.R * cfg.R / cfg.I0;
    return cfg.G * (1.0 + ratio) * (1.0 + ratio);
}

std::vector<BucketSweepRow> bucket_sweep(const BucketConfig& base,
                                         const std::vector<double>& I0_values) {
    std::vector<BucketSweepRow> rows;
    rows.reserve(I0_values.size());
    for (double v : I0_values) {
        if (!(v > 0.0)) throw InvalidState("bucket_sweep: all I0 values must be > 0");
        BucketConfig cfg = base;
        // An infinite sweep point selects the rigid-background flag; the
        // balance formulas never see a non-finite float.
        cfg.I0_infinite = std::isinf(v);
        cfg.I0 = cfg.I0_infinite ? base.I0 : v;
        const BucketBalance b = bucket_balance(cfg);
        rows.push_back({v, b.Omega_b, b.Omega, g_eff(cfg)});
    }
    return rows;
}

namespace {

struct RingGeometry {
    int n = 0;
    double R_s = 0.0;
    double mass_each = 0.0;  // I0 / (n R_s^2)
    double rate = 0.0;       // prescribed angular velocity
    double phase0 = 0.0;     // angle of particle 0 at t = 0
};

// In-plane acceleration at point p from every ring particle at time t.
Vec3 ring_acceleration(const RingGeometry& ring, double G, const Vec3& p, double t) {
    Vec3 acc = Vec3::Zero();
    const double base = ring.phase0 + ring.rate * t;
    for (int a = 0; a < ring.n; ++a) {
        const double phi = base + 2.0 * M_PI * a / ring.n;
        const Vec3 q(ring.R_s * std::cos(phi), ring.R_s * std::sin(phi), 0.0);
        const Vec3 d = q - p;
        const double r2 = d.squaredNorm();
        acc += G * ring.mass_each * d / (r2 * std::sqrt(r2));
    }
    return acc;
}

// Least-squares slope of y against t for equally weighted samples.
double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    double tm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tm += t[i];
        ym += y[i];
    }
    tm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (t[i] - tm) * (y[i] - ym);
        den += (t[i] - tm) * (t[i] - tm);
    }
    return num / den;
}

}  // namespace

double ring_mean_radial_pull(const BucketConfig& cfg, const RingSimConfig& sim, double r) {
    RingGeometry ring;
    ring.n = sim.n_shell;
    ring.R_s = sim.R_s;
    ring.mass_each = cfg.I0 / (sim.n_shell * sim.R_s * sim.R_s);
    ring.phase0 = M_PI / sim.n_shell;
    // Average the radial component over many azimuths of the test point.
    const int K = 1024;
    double mean = 0.0;
    for (int k = 0; k < K; ++k) {
        const double th = 2.0 * M_PI * k / K;
        const Vec3 p(r * std::cos(th), r * std::sin(th), 0.0);
        const Vec3 a = ring_acceleration(ring, cfg.G, p, 0.0);
        mean += -(a.x() * std::cos(th) + a.y() * std::sin(th));  // inward positive
    }
    return mean / K;
}

BucketSimResult bucket_simulation(const BucketConfig& cfg, const RingSimConfig& sim) {
    cfg.validate();
    if (cfg.I0_infinite) throw InvalidState("bucket_simulation needs a finite I0 ring");
    if (!(cfg.I0 > 0.0)) throw InvalidState("bucket_simulation requires I0 > 0");
    if (sim.n_shell < 8) throw InvalidState("bucket_simulation requires n_shell >= 8");
    if (!(sim.R_s > 2.0 * cfg.R)) throw InvalidState("bucket_simulation requires R_s > 2 R");
    if (!(sim.dt > 0.0) || sim.steps <= 0 || sim.record_every <= 0)
        throw InvalidState("bucket_simulation: dt > 0, steps > 0, record_every > 0 required");

    RingGeometry ring;
    ring.n = sim.n_shell;
    ring.R_s = sim.R_s;
    ring.mass_each = cfg.I0 / (sim.n_shell * sim.R_s * sim.R_s);
    ring.phase0 = M_PI / sim.n_shell;

    // Start the binary on the circular orbit of the combined field so the
    // frequency fit sees an almost purely linear phase.
    const double mean_pull = sim.ring_gravity_on_binary
                                 ? ring_mean_radial_pull(cfg, sim, cfg.R)
                                 : 0.0;
    const double w0_sq = cfg.G * cfg.m / (4.0 * cfg.R * cfg.R * cfg.R) + mean_pull / cfg.R;
    if (!(w0_sq > 0.0))
        throw InvalidState("bucket_simulation: ring pull overwhelms binary gravity");
    const double w0 = std::sqrt(w0_sq);
    // Counter-rotation rate that zeroes the total angular momentum.
    ring.rate = -2.0 * cfg.m * cfg.R * cfg.R * w0 / cfg.I0;

    // State: two binary bodies; ring motion is prescribed.
    Vec3 x0(cfg.R, 0.0, 0.0), x1(-cfg.R, 0.0, 0.0);
    Vec3 v0(0.0, cfg.R * w0, 0.0), v1(0.0, -cfg.R * w0, 0.0);

    auto accel = [&](const Vec3& xa, const Vec3& xb, double t) {
        const Vec3 d = xb - xa;
        const double r2 = d.squaredNorm();
        Vec3 a = cfg.G * cfg.m * d / (r2 * std::sqrt(r2));
        if (sim.ring_gravity_on_binary) a += ring_acceleration(ring, cfg.G, xa, t);
        return a;
    };

    BucketSimResult out;
    out.binary_trajectory.dt = sim.dt * sim.record_every;
    out.binary_trajectory.samples.reserve(
        static_cast<std::size_t>(sim.steps / sim.record_every) + 2);

    std::vector<double> times, angles;
    times.reserve(sim.steps + 1);
    angles.reserve(sim.steps + 1);

    double prev_angle = std::atan2(x0.y(), x0.x());
    double unwrapped = prev_angle;
    double t = 0.0;

    auto record = [&](int step) {
        const double raw = std::atan2(x0.y(), x0.x());
        double delta = raw - prev_angle;
        while (delta > M_PI) delta -= 2.0 * M_PI;
        while (delta < -M_PI) delta += 2.0 * M_PI;
        unwrapped += delta;
        prev_angle = raw;
        times.push_back(t);
        angles.push_back(unwrapped);
        if (step % sim.record_every == 0) {
            SystemState s = make_state({cfg.m, cfg.m}, {x0, x1}, {v0, v1}, t);
            out.binary_trajectory.samples.push_back(std::move(s));
        }
    };
    record(0);

    for (int step = 0; step < sim.steps; ++step) {
        const Vec3 a1_0 = accel(x0, x1, t), a1_1 = accel(x1, x0, t);
        const Vec3 xk0 = x0 + 0.5 * sim.dt * v0, xk1 = x1 + 0.5 * sim.dt * v1;
        const Vec3 vk0 = v0 + 0.5 * sim.dt * a1_0, vk1 = v1 + 0.5 * sim.dt * a1_1;

        const Vec3 a2_0 = accel(xk0, xk1, t + 0.5 * sim.dt);
        const Vec3 a2_1 = accel(xk1, xk0, t + 0.5 * sim.dt);
        const Vec3 xl0 = x0 + 0.5 * sim.dt * vk0, xl1 = x1 + 0.5 * sim.dt * vk1;
        const Vec3 vl0 = v0 + 0.5 * sim.dt * a2_0, vl1 = v1 + 0.5 * sim.dt * a2_1;

        const Vec3 a3_0 = accel(xl0, xl1, t + 0.5 * sim.dt);
        const Vec3 a3_1 = accel(xl1, xl0, t + 0.5 * sim.dt);
        const Vec3 xm0 = x0 + sim.dt * vl0, xm1 = x1 + sim.dt * vl1;
        const Vec3 vm0 = v0 + sim.dt * a3_0, vm1 = v1 + sim.dt * a3_1;

        const Vec3 a4_0 = accel(xm0, xm1, t + sim.dt);
        const Vec3 a4_1 = accel(xm1, xm0, t + sim.dt);

        x0 += sim.dt / 6.0 * (v0 + 2.0 * vk0 + 2.0 * vl0 + vm0);
        x1 += sim.dt / 6.0 * (v1 + 2.0 * vk1 + 2.0 * vl1 + vm1);
        v0 += sim.dt / 6.0 * (a1_0 + 2.0 * a2_0 + 2.0 * a3_0 + a4_0);
        v1 += sim.dt / 6.0 * (a1_1 + 2.0 * a2_1 + 2.0 * a3_1 + a4_1);
        t += sim.dt;
        if (!x0.allFinite() || !v0.allFinite() || !x1.allFinite() || !v1.allFinite())
            throw StepRejected("bucket_simulation: non-finite state at t = " + std::to_string(t));
        record(step + 1);
    }

    out.binary_frequency = fit_slope(times, angles);
    out.ring_frequency = ring.rate;
    out.measured_relative_frequency = out.binary_frequency - out.ring_frequency;
    out.predicted = bucket_balance(cfg).Omega_b;
    out.relative_error =
        std::abs(out.measured_relative_frequency - out.predicted) / out.predicted;
    return out;
}

}  // namespace relmech
