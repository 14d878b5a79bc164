// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include <cmath>
#include <random>

#include "doctest.h"
#include "em_core.hpp"
#include "error.hpp"

using namespace spss;
using em::Direction;

namespace {

em::PlaneWave wave_at(double th, double ph, cplx te = 1.0, cplx tm = 0.0)
{
    em::PlaneWave w;
    w.frequency = 3.5e9;
    w.incidence = Direction::from_degrees(th, ph);
    w.e_te = te;
    w.e_tm = tm;
    return w;
}

} // namespace

TEST_CASE("broadside basis is y / x")
{
    const auto b = em::incident_basis(wave_at(0, 0));
    CHECK((b.e_te - Vec3::UnitY()).norm() < 1e-15);
    CHECK((b.e_tm - Vec3::UnitX()).norm() < 1e-15);
    const double k0 = 2 * kPi * 3.5e9 / kSpeedOfLight;
    CHECK(k0 == doctest::Approx(73.30).epsilon(1e-3));
    CHECK((b.k_inc - Vec3(0, 0, -k0)).norm() < 1e-12);
}

TEST_CASE("broadside basis follows phi continuously")
{
    for (double ph : {10.0, 45.0, -120.0}) {
        const auto b = em::incident_basis(wave_at(0, ph));
        const double r = deg2rad(ph);
        CHECK((b.e_te - Vec3(-std::sin(r), std::cos(r), 0)).norm() < 1e-14);
        // limit of the oblique basis as theta -> 0
        const auto o = em::incident_basis(wave_at(1e-7, ph));
        CHECK((b.e_te - o.e_te).norm() < 1e-6);
        CHECK((b.e_tm - o.e_tm).norm() < 1e-6);
    }
}

TEST_CASE("oblique basis at (50, -8)")
{
    const em::PlaneWave w = wave_at(50, -8);
    const auto b = em::incident_basis(w);
    const Vec3 kn = b.k_inc / (-w.k0());
    CHECK(kn.x() == doctest::Approx(0.7585).epsilon(2e-4));
    CHECK(kn.y() == doctest::Approx(-0.1066).epsilon(5e-4));
    CHECK(kn.z() == doctest::Approx(0.6428).epsilon(2e-4));
    CHECK(b.k_inc.norm() == doctest::Approx(w.k0()).epsilon(1e-14));
}

TEST_CASE("incident basis is a right-handed orthonormal triad")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(0.5, 89.5), ph(-180, 180);
    for (int i = 0; i < 500; ++i) {
        const auto b = em::incident_basis(wave_at(th(rng), ph(rng)));
        const Vec3 k = b.k_inc.normalized();
        CHECK(std::abs(b.e_te.norm() - 1) < 1e-12);
        CHECK(std::abs(b.e_tm.norm() - 1) < 1e-12);
        CHECK(std::abs(b.e_te.dot(k)) < 1e-12);
        CHECK(std::abs(b.e_tm.dot(k)) < 1e-12);
        CHECK(std::abs(b.e_te.dot(b.e_tm)) < 1e-12);
        CHECK((b.e_te.cross(b.e_tm) - k).norm() < 1e-12);
        // e_te is along k x n
        const Vec3 kxn = b.k_inc.cross(Vec3::UnitZ()).normalized();
        CHECK((b.e_te - kxn).norm() < 1e-12);
    }
}

TEST_CASE("circular broadside field at the origin")
{
    const auto f = em::incident_fields(wave_at(0, 0, 1.0, kJ), Vec3::Zero());
    CHECK((f.e - CVec3(kJ, 1.0, 0.0)).norm() < 1e-15);
}

TEST_CASE("TE broadside magnetic field")
{
    const auto f = em::incident_fields(wave_at(0, 0, 1.0, 0.0), Vec3::Zero());
    CHECK((f.h - CVec3(1.0 / kEta0, 0.0, 0.0)).norm() < 1e-15);
}

TEST_CASE("circular broadside magnetic field")
{
    // H = (1 / eta0) (-z) x (j, 1, 0) = (1, -j, 0) / eta0
    const auto f = em::incident_fields(wave_at(0, 0, 1.0, kJ), Vec3::Zero());
    CHECK((f.h - CVec3(1.0, -kJ, 0.0) / kEta0).norm() < 1e-15);
}

TEST_CASE("plane wave is periodic along propagation and transverse")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> th(0, 89), ph(-180, 180), r(-1, 1), a(-2, 2);
    for (int i = 0; i < 200; ++i) {
        const em::PlaneWave w = wave_at(th(rng), ph(rng), cplx(a(rng), a(rng)), cplx(a(rng), a(rng)));
        const Vec3 p(r(rng), r(rng), r(rng));
        const Vec3 k_hat = em::incident_basis(w).k_inc.normalized();
        const auto f0 = em::incident_fields(w, p);
        const auto f1 = em::incident_fields(w, p + w.wavelength() * k_hat);
        CHECK((f0.e - f1.e).norm() < 1e-12 * f0.e.norm());
        CHECK(std::abs(k_hat.cast<cplx>().dot(f0.e)) < 1e-12 * f0.e.norm());
        CHECK(std::abs(kEta0 * f0.h.norm() - f0.e.norm()) < 1e-12 * f0.e.norm());
    }
}

TEST_CASE("wave validation")
{
    em::PlaneWave w = wave_at(0, 0, 0.0, 0.0);
    CHECK_THROWS_AS(w.validate(), Error);
    w = wave_at(0, 0);
    w.frequency = 0;
    CHECK_THROWS_AS(w.validate(), Error);
}

TEST_CASE("lattice centres")
{
    em::Lattice l{4, 3, 0.1, 0.2};
    CHECK(l.x(0) == doctest::Approx(-0.15));
    CHECK(l.x(3) == doctest::Approx(0.15));
    CHECK(l.y(1) == doctest::Approx(0.0));
    CHECK(l.area() == doctest::Approx(12 * 0.02));
}

TEST_CASE("footprint of (50, -8) from 5 m")
{
    em::Mounting m;
    m.height = 5.0;
    const auto g = em::footprint_point(Direction::from_degrees(50, -8), m);
    CHECK(std::abs(g.x - (-35.7)) < 0.2);
    CHECK(std::abs(g.y - 30.14) < 0.2);
}

TEST_CASE("footprint scales with height")
{
    em::Mounting m5, m10;
    m5.height = 5.0;
    m10.height = 10.0;
    const Direction d = Direction::from_degrees(50, -8);
    const auto a = em::footprint_point(d, m5), b = em::footprint_point(d, m10);
    CHECK(b.x == doctest::Approx(2 * a.x).epsilon(1e-14));
    CHECK(b.y == doctest::Approx(2 * a.y).epsilon(1e-14));
    em::Mounting m3;
    m3.height = 3.7;
    const auto c = em::footprint_point(d, m3);
    CHECK(c.x == doctest::Approx(a.x * 3.7 / 5).epsilon(1e-14));
}

TEST_CASE("rays that do not descend miss the ground")
{
    em::Mounting m;
    for (double ph : {0.0, 180.0, 8.0, 90.0}) {
        try {
            em::footprint_point(Direction::from_degrees(50, ph), m);
            FAIL("expected no ground intersection");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::no_ground_intersection);
        }
    }
}

TEST_CASE("ground ray inverts the footprint")
{
    em::Mounting m;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> th(5, 85), ph(-175, -5);
    for (int i = 0; i < 100; ++i) {
        const Direction d = Direction::from_degrees(th(rng), ph(rng));
        const auto g = em::footprint_point(d, m);
        const auto r = em::ground_ray(g, m);
        CHECK(r.in_front);
        CHECK(em::angular_separation(r.dir, d) < 1e-10);
        CHECK(r.distance == doctest::Approx(std::sqrt(g.x * g.x + g.y * g.y + 25.0)).epsilon(1e-12));
    }
}

TEST_CASE("mounting is a proper rotation")
{
    em::Mounting m;
    Eigen::Matrix3d r;
    r.col(0) = m.to_global(Vec3::UnitX());
    r.col(1) = m.to_global(Vec3::UnitY());
    r.col(2) = m.to_global(Vec3::UnitZ());
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < 1e-15);
    CHECK(r.determinant() == doctest::Approx(1.0));
}
