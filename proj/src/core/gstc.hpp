// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <vector>

#include "em_core.hpp"

namespace spss::gstc {

// Diagonal surface susceptibilities of one unit cell, (xx, yy, zz), metres.
struct SusceptibilityCell {
    CVec3 psi_e = CVec3::Zero();
    CVec3 psi_m = CVec3::Zero();

    bool operator==(const SusceptibilityCell&) const = default;
};

struct SusceptibilityField {
    em::Lattice lattice;
    std::vector<SusceptibilityCell> cells; // index p + P*q

    SusceptibilityField() = default;
    explicit SusceptibilityField(const em::Lattice& l) : lattice(l), cells(l.size()) {}

    const SusceptibilityCell& at(int p, int q) const { return cells[lattice.index(p, q)]; }
    SusceptibilityCell& at(int p, int q) { return cells[lattice.index(p, q)]; }
};

// Local reflection tensor in the (e_te, e_tm) basis. The co-polar sheet
// transmissions implied by the same susceptibilities ride along so that the
// inverse map can be applied exactly.
struct ReflectionTensor {
    cplx te_te{0.0, 0.0};
    cplx te_tm{0.0, 0.0};
    cplx tm_te{0.0, 0.0};
    cplx tm_tm{0.0, 0.0};
    cplx t_te{1.0, 0.0};
    cplx t_tm{1.0, 0.0};
};

struct Transmission {
    cplx te{0.0, 0.0};
    cplx tm{0.0, 0.0};
};

// Normal-incidence GSTC sheet relations. TE pairs (psi_e_yy, psi_m_xx), TM
// pairs (psi_e_xx, psi_m_yy).
ReflectionTensor reflection_from_susceptibility(const SusceptibilityCell& cell, const em::PlaneWave& wave);

// psi_e = (2j/k0)(T+R-1)/(T+R+1), psi_m = (2j/k0)(T-R-1)/(T-R+1).
// T defaults to 0 (grounded, fully reflective skin).
SusceptibilityCell susceptibility_from_reflection(const ReflectionTensor& r, const Transmission& t,
                                                  const em::PlaneWave& wave);
SusceptibilityCell susceptibility_from_reflection(const ReflectionTensor& r, const em::PlaneWave& wave);

struct AveragedFields {
    CVec3 e = CVec3::Zero();
    CVec3 h = CVec3::Zero();
};

// Cell averages of (incident + reflected) fields. E uses (1 + R)/2; the
// reflected tangential H carries the opposite sign, i.e. H uses
// (1 + k x R k x)/2, which is (1 - R)/2 per polarisation.
std::vector<AveragedFields> averaged_fields(const SusceptibilityField& field, const em::PlaneWave& wave);

struct PolarizationDensities {
    CVec3 s_e = CVec3::Zero(); // C/m
    CVec3 s_m = CVec3::Zero(); // A
};

std::vector<PolarizationDensities> polarization_densities(const SusceptibilityField& field,
                                                          const std::vector<AveragedFields>& averaged);

// Tangential effective currents J^tot per cell, (x, y) components, V/m.
struct SurfaceCurrentField {
    em::Lattice lattice;
    std::vector<CVec2> j; // index p + P*q

    SurfaceCurrentField() = default;
    explicit SurfaceCurrentField(const em::Lattice& l) : lattice(l), j(l.size(), CVec2::Zero()) {}

    const CVec2& at(int p, int q) const { return j[lattice.index(p, q)]; }
    CVec2& at(int p, int q) { return j[lattice.index(p, q)]; }
};

SurfaceCurrentField surface_currents(const SusceptibilityField& field, const em::PlaneWave& wave);

} // namespace spss::gstc
