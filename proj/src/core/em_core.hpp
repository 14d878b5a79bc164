// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <utility>

#include "constants.hpp"

namespace spss::em {

// Propagation direction in the skin's local frame (skin normal = +z).
struct Direction {
    double theta = 0.0; // rad, 0 = broadside
    double phi = 0.0;   // rad

    double u() const { return std::sin(theta) * std::cos(phi); }
    double v() const { return std::sin(theta) * std::sin(phi); }
    Vec3 unit() const;

    static Direction from_degrees(double theta_deg, double phi_deg);
    // Requires u^2 + v^2 <= 1; returns the forward (z >= 0) direction.
    static Direction from_uv(double u, double v);
    static Direction from_vector(const Vec3& r);
};

// Angle between two directions, rad.
double angular_separation(const Direction& a, const Direction& b);

struct PlaneWave {
    double frequency = 3.5e9; // Hz
    Direction incidence;
    cplx e_te{1.0, 0.0};      // V/m
    cplx e_tm{0.0, 0.0};      // V/m

    double k0() const { return 2.0 * kPi * frequency / kSpeedOfLight; }
    double omega() const { return 2.0 * kPi * frequency; }
    double wavelength() const { return kSpeedOfLight / frequency; }
    void validate() const;
};

struct IncidentBasis {
    Vec3 k_inc; // 1/m, points along the propagation (into the skin)
    Vec3 e_te;
    Vec3 e_tm;
};

// TE/TM unit vectors with (e_te, e_tm, k_hat) right-handed. At broadside the
// cross product degenerates and the phi-continuous limit is used, which gives
// e_te = y, e_tm = x for phi = 0.
IncidentBasis incident_basis(const PlaneWave& wave);

struct IncidentFields {
    CVec3 e;
    CVec3 h;
};

IncidentFields incident_fields(const PlaneWave& wave, const Vec3& r);

// Regular P x Q lattice on the local xy-plane centred at the origin.
// Cell indices are zero-based; (p, q) runs along (x, y).
struct Lattice {
    int P = 1;
    int Q = 1;
    double dx = 0.0428;
    double dy = 0.0428;

    int size() const { return P * Q; }
    int index(int p, int q) const { return p + P * q; }
    double x(int p) const { return (p - 0.5 * (P - 1)) * dx; }
    double y(int q) const { return (q - 0.5 * (Q - 1)) * dy; }
    Vec3 center(int p, int q) const { return {x(p), y(q), 0.0}; }
    double cell_area() const { return dx * dy; }
    double area() const { return P * Q * dx * dy; }
    void validate() const;
};

// Wall-mounted skin: local z (normal) -> global +y, local x -> global -x,
// local y -> global +z (up). The skin centre sits at (0, 0, H).
struct Mounting {
    double height = 5.0; // m

    Vec3 to_global(const Vec3& local) const { return {-local.x(), local.z(), local.y()}; }
    Vec3 to_local(const Vec3& global) const { return {-global.x(), global.z(), global.y()}; }
    Vec3 origin() const { return {0.0, 0.0, height}; }
    void validate() const;
};

struct GroundPoint {
    double x = 0.0;
    double y = 0.0;
};

// Where the ray leaving the skin centre along `dir` meets z_glob = 0.
// Throws Errc::no_ground_intersection if the ray does not descend.
GroundPoint footprint_point(const Direction& dir, const Mounting& mount);

struct GroundRay {
    Direction dir;      // local frame
    double distance;    // skin centre to ground point, m
    bool in_front;      // false when the point lies behind the skin plane
};

// Inverse of footprint_point: the local direction that reaches (x, y).
GroundRay ground_ray(const GroundPoint& g, const Mounting& mount);

} // namespace spss::em
