#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "relmech/bucket.hpp"
#include "test_helpers.hpp"

using namespace relmech;
using namespace relmech::testing;

TEST_CASE("balance: infinite shell inertia gives the bare Kepler rate") {
    BucketConfig cfg;
    cfg.I0_infinite = true;
    const BucketBalance b = bucket_balance(cfg);
    CHECK(b.Omega_b == 0.5);
    CHECK(b.Omega == 0.5);
    CHECK(b.finite_equilibrium);
}

TEST_CASE("balance: the reference shell speeds the co-orbit up by 2 percent") {
    BucketConfig cfg;  // m = R = G = 1, I0 = 100
    const BucketBalance b = bucket_balance(cfg);
    CHECK(b.Omega_b == doctest::Approx(0.51).epsilon(1e-15));
    CHECK(b.Omega == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("balance: removing the shell leaves no finite equilibrium") {
    BucketConfig cfg;
    cfg.I0 = 0.0;
    const BucketBalance b = bucket_balance(cfg);
    CHECK_FALSE(b.finite_equilibrium);
    CHECK(std::isinf(b.Omega_b));
}

TEST_CASE("effective coupling: reference value, limits, and algebraic point") {
    BucketConfig cfg;
    CHECK(g_eff(cfg) == doctest::Approx(1.0404).epsilon(1e-15));

    cfg.I0_infinite = true;
    CHECK(g_eff(cfg) == 1.0);

    BucketConfig unit;  // 2 m R^2 / I0 = 1
    unit.I0 = 2.0;
    CHECK(g_eff(unit) == 4.0);

    BucketConfig bad;
    bad.I0 = 0.0;
    CHECK_THROWS_AS(g_eff(bad), InvalidState);
}

TEST_CASE("effective coupling grows with the orbiting mass") {
    BucketConfig a, b;
    b.m = 2.0;
    CHECK(g_eff(b) > g_eff(a));
}

TEST_CASE("sweep rows are monotone toward the Newtonian limit") {
    BucketConfig base;
    const auto rows = bucket_sweep(base, {10.0, 100.0, 1000.0, 10000.0});
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].G_eff == doctest::Approx(1.44).epsilon(1e-15));
    CHECK(rows[1].G_eff == doctest::Approx(1.0404).epsilon(1e-15));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].Omega_b < rows[i - 1].Omega_b);
        CHECK(rows[i].G_eff < rows[i - 1].G_eff);
        CHECK(rows[i].G_eff > 1.0);
        CHECK(rows[i].Omega_b > 0.5);
    }
    CHECK_THROWS_AS(bucket_sweep(base, {1.0, -2.0}), InvalidState);
}

TEST_CASE("ring simulation reproduces the closed-form relative frequency") {
    BucketConfig cfg;
    RingSimConfig sim;
    sim.steps = 12600;  // about two binary periods at dt = 2e-3
    const BucketSimResult r = bucket_simulation(cfg, sim);
    CHECK(r.predicted == doctest::Approx(0.51).epsilon(1e-15));
    CHECK(r.relative_error < 1e-2);
    CHECK(r.ring_frequency < 0.0);
    CHECK(r.binary_frequency > 0.0);
    // The counter-rotation cancels the binary's angular momentum.
    CHECK(rel_close(2.0 * cfg.m * cfg.R * cfg.R * r.binary_frequency,
                    -cfg.I0 * r.ring_frequency, 1e-3));
}

TEST_CASE("ring simulation error falls as the ring recedes and refines") {
    BucketConfig cfg;
    RingSimConfig sim;
    sim.steps = 12600;
    double prev = 1.0;
    for (const auto& [rs, n] : std::vector<std::pair<double, int>>{
             {50.0, 16}, {100.0, 32}, {200.0, 64}}) {
        sim.R_s = rs;
        sim.n_shell = n;
        const BucketSimResult r = bucket_simulation(cfg, sim);
        CHECK(r.relative_error < prev);
        prev = r.relative_error;
    }
}

TEST_CASE("switching off the ring's pull on the binary tightens the match") {
    BucketConfig cfg;
    RingSimConfig near_ring;
    near_ring.R_s = 25.0;
    near_ring.steps = 12600;
    const double with_pull = bucket_simulation(cfg, near_ring).relative_error;
    near_ring.ring_gravity_on_binary = false;
    const double without = bucket_simulation(cfg, near_ring).relative_error;
    CHECK(without < with_pull);
    CHECK(without < 1e-9);
}

TEST_CASE("with no shell and no spin the binary falls radially") {
    // Two bodies alone with J = 0 cannot orbit: separation shrinks.
    const SystemState s0 = make_state({1.0, 1.0}, {Vec3(1, 0, 0), Vec3(-1, 0, 0)},
                                      {Vec3::Zero(), Vec3::Zero()});
    const Trajectory traj =
        integrate_newtonian_gauge(s0, PairPotential::gravity(1.0), 1e-3, 1500);
    double prev = 2.0;
    for (std::size_t k = 100; k < traj.size(); k += 100) {
        const double sep =
            (traj.samples[k].positions[0] - traj.samples[k].positions[1]).norm();
        CHECK(sep < prev);
        prev = sep;
    }
}

TEST_CASE("simulation configuration is validated") {
    BucketConfig cfg;
    RingSimConfig sim;
    sim.n_shell = 4;
    CHECK_THROWS_AS(bucket_simulation(cfg, sim), InvalidState);
    sim.n_shell = 64;
    sim.R_s = 1.0;
    CHECK_THROWS_AS(bucket_simulation(cfg, sim), InvalidState);

    BucketConfig inf;
    inf.I0_infinite = true;
    CHECK_THROWS_AS(bucket_simulation(inf, RingSimConfig{}), InvalidState);

    BucketConfig neg;
    neg.m = -1.0;
    CHECK_THROWS_AS(bucket_balance(neg), InvalidState);
}
