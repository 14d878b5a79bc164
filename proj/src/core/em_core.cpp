// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "em_core.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace spss::em {

Vec3 Direction::unit() const
{
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Direction Direction::from_degrees(double theta_deg, double phi_deg)
{
    return {deg2rad(theta_deg), deg2rad(phi_deg)};
}

Direction Direction::from_uv(double u, double v)
{
    const double s = std::hypot(u, v);
    if (s > 1.0 + 1e-12) throw Error(Errc::invalid_argument, "direction cosines outside the visible disk");
    return {std::asin(std::min(s, 1.0)), s > 0.0 ? std::atan2(v, u) : 0.0};
}

Direction Direction::from_vector(const Vec3& r)
{
    const double n = r.norm();
    if (n == 0.0) throw Error(Errc::invalid_argument, "zero direction vector");
    const double cz = std::clamp(r.z() / n, -1.0, 1.0);
    const double phi = (r.x() == 0.0 && r.y() == 0.0) ? 0.0 : std::atan2(r.y(), r.x());
    return {std::acos(cz), phi};
}

double angular_separation(const Direction& a, const Direction& b)
{
    const Vec3 ua = a.unit();
    const Vec3 ub = b.unit();
    return std::atan2(ua.cross(ub).norm(), ua.dot(ub));
}

void PlaneWave::validate() const
{
    if (!(frequency > 0.0)) throw Error(Errc::invalid_argument, "frequency must be positive");
    if (std::norm(e_te) + std::norm(e_tm) <= 0.0)
        throw Error(Errc::invalid_argument, "incident amplitudes are both zero");
}

IncidentBasis incident_basis(const PlaneWave& wave)
{
    const double k0 = wave.k0();
    const Vec3 k_hat = -wave.incidence.unit();
    const Vec3 n_hat = Vec3::UnitZ();

    IncidentBasis b;
    b.k_inc = k0 * k_hat;
    const Vec3 kxn = k_hat.cross(n_hat);
    if (kxn.norm() < 1e-12) {
        const double phi = wave.incidence.phi;
        b.e_te = Vec3(-std::sin(phi), std::cos(phi), 0.0);
    } else {
        b.e_te = kxn.normalized();
    }
    b.e_tm = k_hat.cross(b.e_te).normalized();
    return b;
}

IncidentFields incident_fields(const PlaneWave& wave, const Vec3& r)
{
    const IncidentBasis b = incident_basis(wave);
    const cplx phase = std::exp(-kJ * b.k_inc.dot(r));
    IncidentFields f;
    f.e = (wave.e_te * b.e_te.cast<cplx>() + wave.e_tm * b.e_tm.cast<cplx>()) * phase;
    f.h = cross(b.k_inc.cast<cplx>(), f.e) / (kEta0 * wave.k0());
    return f;
}

void Lattice::validate() const
{
    if (P < 1 || Q < 1) throw Error(Errc::invalid_argument, "lattice needs P, Q >= 1");
    if (!(dx > 0.0) || !(dy > 0.0)) throw Error(Errc::invalid_argument, "lattice spacing must be positive");
}

void Mounting::validate() const
{
    if (!(height > 0.0)) throw Error(Errc::invalid_argument, "mounting height must be positive");
}

GroundPoint footprint_point(const Direction& dir, const Mounting& mount)
{
    const Vec3 g = mount.to_global(dir.unit());
    if (!(g.z() < -1e-12))
        throw Error(Errc::no_ground_intersection, "ray does not descend towards the ground");
    const double t = mount.height / -g.z();
    return {t * g.x(), t * g.y()};
}

GroundRay ground_ray(const GroundPoint& g, const Mounting& mount)
{
    const Vec3 d = Vec3(g.x, g.y, 0.0) - mount.origin();
    const double rho = d.norm();
    const Vec3 local = mount.to_local(d / rho);
    GroundRay ray;
    ray.distance = rho;
    ray.in_front = local.z() > 0.0;
    ray.dir = Direction::from_vector(local);
    return ray;
}

} // namespace spss::em
