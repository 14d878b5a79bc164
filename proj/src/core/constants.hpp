// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace spss {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CVec2 = Eigen::Vector2cd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;         // m/s
inline constexpr double kMu0 = 1.25663706212e-6;             // H/m
inline constexpr double kEps0 = 1.0 / (kMu0 * kSpeedOfLight * kSpeedOfLight);
inline constexpr double kEta0 = kMu0 * kSpeedOfLight;        // ohm
inline constexpr cplx kJ{0.0, 1.0};

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Bilinear cross product. Eigen's cross() conjugates complex operands.
inline CVec3 cross(const CVec3& a, const CVec3& b)
{
    return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x()};
}

// sin(x)/x with the removable singularity filled in
inline double sinc(double x)
{
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

} // namespace spss
