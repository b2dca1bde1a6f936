#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>

#include "relmech/relational.hpp"
#include "test_helpers.hpp"

using namespace relmech;
using namespace relmech::testing;

TEST_CASE("center of mass: symmetric dumbbell sits at the origin") {
    const auto [x_c, u_c] = center_of_mass(dumbbell_state());
    CHECK(x_c.norm() == 0.0);
    CHECK(u_c.norm() == 0.0);
}

TEST_CASE("center of mass: single body is its own CM") {
    const SystemState s = make_state({2.0}, {Vec3(3, 0, 0)}, {Vec3(1, 0, 0)});
    const auto [x_c, u_c] = center_of_mass(s);
    CHECK(x_c == Vec3(3, 0, 0));
    CHECK(u_c == Vec3(1, 0, 0));
}

TEST_CASE("center of mass: matches brute-force summation on random states") {
    Rng rng(101);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 5);
        Vec3 xs = Vec3::Zero(), vs = Vec3::Zero();
        double M = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            xs += s.bodies[i].mass * s.positions[i];
            vs += s.bodies[i].mass * s.velocities[i];
            M += s.bodies[i].mass;
        }
        const auto [x_c, u_c] = center_of_mass(s);
        CHECK(vec_close(x_c, xs / M, 1e-14));
        CHECK(vec_close(u_c, vs / M, 1e-14));
    }
}

TEST_CASE("inertia tensor: rod about its axis gives diag(0,2,2) in both forms") {
    const SystemState s = dumbbell_state();
    const Mat3 expected = Vec3(0, 2, 2).asDiagonal();
    CHECK(mat_close(inertia_tensor(s, InertiaForm::SingleBody), expected, 1e-15));
    CHECK(mat_close(inertia_tensor(s, InertiaForm::Pairwise), expected, 1e-15));
}

TEST_CASE("inertia tensor: single body carries no relational structure") {
    const SystemState s = make_state({2.0}, {Vec3(3, 1, -2)}, {Vec3(1, 0, 0)});
    CHECK(inertia_tensor(s, InertiaForm::SingleBody).norm() == 0.0);
    CHECK(inertia_tensor(s, InertiaForm::Pairwise).norm() == 0.0);
}

TEST_CASE("inertia tensor: forms agree and absolute tensor decomposes") {
    Rng rng(102);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 4);
        const Mat3 a = inertia_tensor(s, InertiaForm::SingleBody);
        const Mat3 b = inertia_tensor(s, InertiaForm::Pairwise);
        CHECK(mat_close(a, b, 1e-12));
        const auto [x_c, u_c] = center_of_mass(s);
        const double M = s.total_mass();
        const Mat3 cm_part =
            M * (x_c.squaredNorm() * Mat3::Identity() - x_c * x_c.transpose());
        CHECK(mat_close(absolute_inertia_tensor(s), a + cm_part, 1e-12));
    }
}

TEST_CASE("inertia inverse: rod tensor maps to reciprocal on its range") {
    const Mat3 rod = Vec3(0, 2, 2).asDiagonal();
    const Mat3 expected = Vec3(0, 0.5, 0.5).asDiagonal();
    CHECK(mat_close(inertia_inverse(rod), expected, 1e-14));
}

TEST_CASE("inertia inverse: scaled identity inverts exactly") {
    CHECK(mat_close(inertia_inverse(5.0 * Mat3::Identity()), 0.2 * Mat3::Identity(), 1e-15));
}

TEST_CASE("inertia inverse: matches direct inversion for full-rank tensors") {
    Rng rng(103);
    for (int rep = 0; rep < 50; ++rep) {
        Mat3 A;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) A(r, c) = rng.uniform(-1.0, 1.0);
        const Mat3 psd = A * A.transpose() + 0.5 * Mat3::Identity();
        CHECK(mat_close(inertia_inverse(psd), psd.inverse(), 1e-12));
    }
}

TEST_CASE("inertia inverse: all-null tensor is rejected") {
    CHECK_THROWS_AS(inertia_inverse(Mat3::Zero()), DegenerateInertia);
}

TEST_CASE("angular momentum: dumbbell gives (0,0,2) in all three forms") {
    const SystemState s = dumbbell_state();
    for (JForm f : {JForm::AbsoluteMinusCm, JForm::CmRelative, JForm::Pairwise})
        CHECK(vec_close(angular_momentum(s, f), Vec3(0, 0, 2), 1e-14));
}

TEST_CASE("angular momentum: a pure boost has none") {
    Rng rng(104);
    SystemState s = random_state(rng, 5);
    for (auto& v : s.velocities) v = Vec3(3, -1, 2);
    for (JForm f : {JForm::AbsoluteMinusCm, JForm::CmRelative, JForm::Pairwise})
        CHECK(angular_momentum(s, f).norm() < 1e-12 * 100.0);
}

TEST_CASE("angular momentum: three forms agree on random states") {
    Rng rng(105);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 6);
        const Vec3 a = angular_momentum(s, JForm::AbsoluteMinusCm);
        const Vec3 b = angular_momentum(s, JForm::CmRelative);
        const Vec3 c = angular_momentum(s, JForm::Pairwise);
        CHECK(vec_close(a, b, 1e-12));
        CHECK(vec_close(b, c, 1e-12));
    }
}

TEST_CASE("angular velocity: dumbbell spins at (0,0,1)") {
    CHECK(vec_close(omega(dumbbell_state()), Vec3(0, 0, 1), 1e-14));
}

TEST_CASE("angular velocity: co-moving bodies have none") {
    Rng rng(106);
    SystemState s = random_state(rng, 4);
    for (auto& v : s.velocities) v = Vec3(1, 2, 3);
    CHECK(omega(s).norm() < 1e-12);
}

TEST_CASE("angular velocity: inertia times omega reproduces J") {
    Rng rng(107);
    for (int rep = 0; rep < 50; ++rep) {
        SystemState s = random_state(rng, 3);
        // Planar configuration: z = 0, velocities in-plane.
        for (auto& x : s.positions) x.z() = 0.0;
        for (auto& v : s.velocities) v.z() = 0.0;
        const Vec3 J = angular_momentum(s);
        const Vec3 w = omega(s);
        CHECK(vec_close(inertia_tensor(s) * w, J, 1e-12, J.norm()));
    }
}

TEST_CASE("kinetic energy: rigid dumbbell rotation is purely absorbed") {
    const SystemState s = dumbbell_state();
    CHECK(kinetic_energy(s, KineticLevel::Absolute) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kinetic_energy(s, KineticLevel::Cm) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(kinetic_energy(s, KineticLevel::Relational)) < 1e-14);
}

TEST_CASE("kinetic energy: a pure boost carries only absolute energy") {
    const SystemState s = make_state({1.0, 1.0}, {Vec3(1, 0, 0), Vec3(-1, 0, 0)},
                                     {Vec3(3, 0, 0), Vec3(3, 0, 0)});
    CHECK(kinetic_energy(s, KineticLevel::Absolute) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(std::abs(kinetic_energy(s, KineticLevel::Cm)) < 1e-14);
    CHECK(std::abs(kinetic_energy(s, KineticLevel::Relational)) < 1e-14);
}

TEST_CASE("kinetic energy: direct and pairwise CM forms agree; levels are ordered") {
    Rng rng(108);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 4);
        const double direct = kinetic_energy(s, KineticLevel::Cm, KineticForm::Direct);
        const double pairwise = kinetic_energy(s, KineticLevel::Cm, KineticForm::Pairwise);
        CHECK(rel_close(direct, pairwise, 1e-13));
        const double rel = kinetic_energy(s, KineticLevel::Relational);
        const double atot = kinetic_energy(s, KineticLevel::Absolute);
        CHECK(rel <= direct * (1 + 1e-12));
        CHECK(direct <= atot * (1 + 1e-12));
        CHECK(rel >= -1e-12 * atot);
    }
}

TEST_CASE("potential energy: two unit masses at separation 2 under gravity") {
    const SystemState s = make_state({1.0, 1.0}, {Vec3(1, 0, 0), Vec3(-1, 0, 0)},
                                     {Vec3::Zero(), Vec3::Zero()});
    CHECK(potential_energy(s, PairPotential::gravity(1.0)) ==
          doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(potential_energy(s, PairPotential::none()) == 0.0);
}

TEST_CASE("potential energy: matches brute-force pair loop") {
    Rng rng(109);
    const PairPotential grav = PairPotential::gravity(1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 3);
        double expected = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j)
                expected += -s.bodies[i].mass * s.bodies[j].mass /
                            (s.positions[i] - s.positions[j]).norm();
        CHECK(rel_close(potential_energy(s, grav), expected, 1e-14));
    }
}

TEST_CASE("potential energy: coincident bodies are rejected under gravity") {
    PairPotential grav = PairPotential::gravity(1.0);
    grav.separation_floor = 0.5;
    const SystemState s = make_state({1.0, 1.0}, {Vec3(0.1, 0, 0), Vec3(-0.1, 0, 0)},
                                     {Vec3::Zero(), Vec3::Zero()});
    CHECK_THROWS_AS(potential_energy(s, grav), SingularSeparation);
    CHECK_NOTHROW(potential_energy(s, PairPotential::harmonic(1.0)));
}

TEST_CASE("lagrangian: rigid rotation with no potential vanishes in both forms") {
    const SystemState s = dumbbell_state();
    CHECK(std::abs(lagrangian(s, PairPotential::none(), LagrangianForm::Relational)) < 1e-14);
    CHECK(std::abs(lagrangian(s, PairPotential::none(), LagrangianForm::CmDecomposed)) < 1e-14);
}

TEST_CASE("lagrangian: static configuration gives minus the potential") {
    Rng rng(110);
    SystemState s = random_state(rng, 4);
    for (auto& v : s.velocities) v = Vec3::Zero();
    const PairPotential grav = PairPotential::gravity(1.0);
    const double V = potential_energy(s, grav);
    CHECK(rel_close(lagrangian(s, grav), -V, 1e-13));
}

TEST_CASE("lagrangian: relational and CM-decomposed forms agree") {
    Rng rng(111);
    const PairPotential grav = PairPotential::gravity(1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 5);
        const double a = lagrangian(s, grav, LagrangianForm::Relational);
        const double b = lagrangian(s, grav, LagrangianForm::CmDecomposed);
        CHECK(rel_close(a, b, 1e-12));
    }
}

TEST_CASE("canonical momenta: rigid dumbbell rotation is fully absorbed") {
    for (const Vec3& p : canonical_momenta(dumbbell_state())) CHECK(p.norm() < 1e-14);
}

TEST_CASE("canonical momenta: with no rotation they reduce to CM-frame momenta") {
    Rng rng(112);
    SystemState s = random_state(rng, 4);
    for (auto& v : s.velocities) v = Vec3(1, -2, 0.5);  // pure boost: Omega = 0
    const auto [x_c, u_c] = center_of_mass(s);
    const auto P = canonical_momenta(s);
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(vec_close(P[i], s.bodies[i].mass * (s.velocities[i] - u_c), 1e-13));
}

TEST_CASE("constraint sums: vanish for random, dumbbell, and boosted states") {
    Rng rng(113);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 6);
        const auto [sum_p, sum_moment] = constraint_residuals(s);
        const auto P = canonical_momenta(s);
        const auto [x_c, u_c] = center_of_mass(s);
        double p_scale = 0.0, m_scale = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            p_scale += P[i].norm();
            m_scale += P[i].norm() * (s.positions[i] - x_c).norm();
        }
        CHECK(sum_p.norm() <= 1e-11 * std::max(p_scale, 1e-12));
        CHECK(sum_moment.norm() <= 1e-11 * std::max(m_scale, 1e-12));
    }
    const auto [a, b] = constraint_residuals(dumbbell_state());
    CHECK(a.norm() < 1e-14);
    CHECK(b.norm() < 1e-14);
}

TEST_CASE("hamiltonian: equals relational kinetic energy plus potential") {
    const PairPotential none = PairPotential::none();
    CHECK(std::abs(hamiltonian(dumbbell_state(), none)) < 1e-14);

    Rng rng(114);
    SystemState lattice = random_state(rng, 4);
    for (auto& v : lattice.velocities) v = Vec3::Zero();
    const PairPotential grav = PairPotential::gravity(1.0);
    CHECK(rel_close(hamiltonian(lattice, grav), potential_energy(lattice, grav), 1e-13));

    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 5);
        const double lhs = hamiltonian(s, grav);
        const double rhs =
            kinetic_energy(s, KineticLevel::Relational) + potential_energy(s, grav);
        CHECK(rel_close(lhs, rhs, 1e-12));
    }
}

TEST_CASE("form equivalence battery across random states") {
    Rng rng(42);
    const PairPotential grav = PairPotential::gravity(1.0);
    for (int rep = 0; rep < 500; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(0, 6));
        const SystemState s = random_state(rng, n);

        const double t_direct = kinetic_energy(s, KineticLevel::Cm, KineticForm::Direct);
        const double t_pair = kinetic_energy(s, KineticLevel::Cm, KineticForm::Pairwise);
        CHECK(rel_close(t_direct, t_pair, 1e-11));

        const Vec3 j1 = angular_momentum(s, JForm::AbsoluteMinusCm);
        const Vec3 j2 = angular_momentum(s, JForm::CmRelative);
        const Vec3 j3 = angular_momentum(s, JForm::Pairwise);
        CHECK(vec_close(j1, j2, 1e-11));
        CHECK(vec_close(j2, j3, 1e-11));

        const Mat3 i1 = inertia_tensor(s, InertiaForm::SingleBody);
        const Mat3 i2 = inertia_tensor(s, InertiaForm::Pairwise);
        CHECK(mat_close(i1, i2, 1e-11));
        const auto [x_c, u_c] = center_of_mass(s);
        const Mat3 shift = s.total_mass() * (x_c.squaredNorm() * Mat3::Identity() -
                                             x_c * x_c.transpose());
        CHECK(mat_close(absolute_inertia_tensor(s), i1 + shift, 1e-11));

        const double l1 = lagrangian(s, grav, LagrangianForm::Relational);
        const double l2 = lagrangian(s, grav, LagrangianForm::CmDecomposed);
        CHECK(rel_close(l1, l2, 1e-11));
    }
}

TEST_CASE("translation and boost leave every relational quantity unchanged") {
    Rng rng(43);
    const PairPotential grav = PairPotential::gravity(1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 5);
        SystemState shifted = s;
        const Vec3 c(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        const Vec3 boost(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
        for (auto& x : shifted.positions) x += c;
        for (auto& v : shifted.velocities) v += boost;

        CHECK(rel_close(kinetic_energy(s, KineticLevel::Cm),
                        kinetic_energy(shifted, KineticLevel::Cm), 1e-11));
        CHECK(rel_close(kinetic_energy(s, KineticLevel::Relational),
                        kinetic_energy(shifted, KineticLevel::Relational), 1e-11, 1e-3));
        CHECK(vec_close(angular_momentum(s), angular_momentum(shifted), 1e-11));
        CHECK(mat_close(inertia_tensor(s), inertia_tensor(shifted), 1e-11));
        CHECK(vec_close(omega(s), omega(shifted), 1e-11, 1e-3));
        CHECK(rel_close(lagrangian(s, grav), lagrangian(shifted, grav), 1e-11));
        CHECK(rel_close(hamiltonian(s, grav), hamiltonian(shifted, grav), 1e-11));
    }
}

TEST_CASE("rigid rotation: scalars invariant, vectors and tensors covariant") {
    Rng rng(44);
    const PairPotential grav = PairPotential::gravity(1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const SystemState s = random_state(rng, 5);
        const Vec3 axis =
            Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
        const Mat3 R = Eigen::AngleAxisd(rng.uniform(0.0, 3.0), axis).toRotationMatrix();
        SystemState rot = s;
        for (auto& x : rot.positions) x = R * x;
        for (auto& v : rot.velocities) v = R * v;

        CHECK(rel_close(kinetic_energy(s, KineticLevel::Relational),
                        kinetic_energy(rot, KineticLevel::Relational), 1e-11, 1e-3));
        CHECK(rel_close(hamiltonian(s, grav), hamiltonian(rot, grav), 1e-11));
        CHECK(vec_close(angular_momentum(rot), R * angular_momentum(s), 1e-11));
        CHECK(vec_close(omega(rot), R * omega(s), 1e-11, 1e-3));
        CHECK(mat_close(inertia_tensor(rot), R * inertia_tensor(s) * R.transpose(), 1e-11));
    }
}

TEST_CASE("rigid-body motion has zero relational kinetic energy") {
    Rng rng(45);
    for (int rep = 0; rep < 50; ++rep) {
        SystemState s = random_state(rng, 5);
        const Vec3 w(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
        const Vec3 boost(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3));
        const auto [x_c, u_c] = center_of_mass(s);
        for (std::size_t i = 0; i < s.size(); ++i)
            s.velocities[i] = boost + w.cross(s.positions[i] - x_c);
        const double t_cm = kinetic_energy(s, KineticLevel::Cm);
        const double t_rel = kinetic_energy(s, KineticLevel::Relational);
        CHECK(std::abs(t_rel) <= 1e-11 * std::max(t_cm, 1.0));
    }
}

TEST_CASE("frame data: totals, pair masses, and the J = inertia * omega relation") {
    Rng rng(46);
    for (int rep = 0; rep < 20; ++rep) {
        const SystemState s = random_state(rng, 5);
        const FrameData f = compute_frame(s);
        double M = 0.0;
        for (const auto& b : s.bodies) M += b.mass;
        CHECK(rel_close(f.total_mass, M, 1e-15));
        Vec3 weighted = Vec3::Zero();
        for (std::size_t i = 0; i < s.size(); ++i)
            weighted += s.bodies[i].mass * (s.positions[i] - f.x_c);
        CHECK(weighted.norm() < 1e-11 * M);
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = 0; j < s.size(); ++j)
                CHECK(rel_close(f.pair_mass(i, j),
                                s.bodies[i].mass * s.bodies[j].mass / M, 1e-14));
        CHECK(vec_close(f.inertia * f.Omega, f.J, 1e-11, f.J.norm()));
    }
}

TEST_CASE("state validation rejects malformed inputs") {
    SystemState s = dumbbell_state();
    s.positions[0].x() = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(s.validate(), InvalidState);

    SystemState t = dumbbell_state();
    t.velocities.pop_back();
    CHECK_THROWS_AS(t.validate(), InvalidState);

    SystemState u = dumbbell_state();
    u.bodies[0].mass = -1.0;
    CHECK_THROWS_AS(u.validate(), InvalidState);

    SystemState empty;
    CHECK_THROWS_AS(empty.validate(), InvalidState);
}
