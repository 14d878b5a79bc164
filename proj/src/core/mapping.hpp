// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <string>
#include <vector>

#include "surrogate.hpp"

namespace spss::mapping {

// Full-scale descriptor grid; zero-based storage p + P*q + P*Q*d.
struct LayoutDescriptors {
    int P = 1;
    int Q = 1;
    int D = 1;
    std::vector<double> values;

    LayoutDescriptors() = default;
    LayoutDescriptors(int p, int q, int d, double fill = 0.0)
        : P(p), Q(q), D(d), values(static_cast<std::size_t>(p) * q * d, fill) {}

    int size() const { return P * Q * D; }
    int index(int p, int q, int d) const { return p + P * q + P * Q * d; }
    double at(int p, int q, int d) const { return values[index(p, q, d)]; }
    double& at(int p, int q, int d) { return values[index(p, q, d)]; }
    void validate(const surrogate::Bounds& b) const;
};

// C0 top-left corner, C1 bottom-right, C2 (p low, q high), C3 (p high, q low),
// C4 strips along the p rim, C5 strips along the q rim, C6 interior.
enum class RegionClass { C0, C1, C2, C3, C4, C5, C6 };

const char* region_name(RegionClass c);

// One-based indices throughout. Band width is
// (Pp-1)/2 along p and (Qp-1)/2 along q.
RegionClass region_class(int p, int q, int P, int Q, int Pp = 5, int Qp = 5);

struct WindowAssignment {
    int anchor_p = 1;
    int anchor_q = 1;
    int local_p = 1;
    int local_q = 1;
};

WindowAssignment window_assignment(int p, int q, int P, int Q, int Pp, int Qp);

// Descriptors of the Pp x Qp window whose top-left cell is the (one-based) anchor.
surrogate::SmallScaleLayout extract_window(const LayoutDescriptors& g, int anchor_p, int anchor_q, int Pp, int Qp);

// Every cell read from its assigned window; windows are predicted once each.
gstc::SusceptibilityField full_scale_susceptibilities(const LayoutDescriptors& g,
                                                      const surrogate::WindowPredictor& twin,
                                                      const em::Lattice& lattice, bool memoize = true);

// p, q, class, anchor, local index per cell
std::string assignment_csv(int P, int Q, int Pp, int Qp);

} // namespace spss::mapping
