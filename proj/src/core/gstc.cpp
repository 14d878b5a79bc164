// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "gstc.hpp"

#include <cmath>

#include "error.hpp"

namespace spss::gstc {

namespace {

void require_normal_incidence(const em::PlaneWave& wave)
{
    if (std::abs(wave.incidence.theta) > 1e-12)
        throw Error(Errc::unsupported, "sheet model supports normal incidence only");
}

// (1 + s) / (1 - s) with the pole guarded
cplx bilinear(cplx s)
{
    if (std::abs(1.0 - s) < 1e-14) throw Error(Errc::singular_mapping, "susceptibility maps onto the pole of the sheet relation");
    return (1.0 + s) / (1.0 - s);
}

struct PairResponse {
    cplx r;
    cplx t;
};

PairResponse pair_response(cplx psi_e, cplx psi_m, double k0)
{
    const cplx a = bilinear(-kJ * (0.5 * k0) * psi_e); // T + R
    const cplx b = bilinear(-kJ * (0.5 * k0) * psi_m); // T - R
    return {0.5 * (a - b), 0.5 * (a + b)};
}

cplx pair_inverse(cplx num, cplx den, double k0)
{
    if (std::abs(den) < 1e-14) throw Error(Errc::singular_inverse, "reflection/transmission pair sits on a pole of the inverse map");
    return (2.0 * kJ / k0) * num / den;
}

// Applies a reflection tensor expressed in the (e_te, e_tm) basis.
CVec3 apply_tensor(const ReflectionTensor& r, const Vec3& e_te, const Vec3& e_tm, const CVec3& f)
{
    const cplx a_te = e_te.cast<cplx>().dot(f); // dot() conjugates the first arg; e_te is real
    const cplx a_tm = e_tm.cast<cplx>().dot(f);
    return e_te.cast<cplx>() * (r.te_te * a_te + r.te_tm * a_tm) + e_tm.cast<cplx>() * (r.tm_te * a_te + r.tm_tm * a_tm);
}

} // namespace

ReflectionTensor reflection_from_susceptibility(const SusceptibilityCell& cell, const em::PlaneWave& wave)
{
    require_normal_incidence(wave);
    const double k0 = wave.k0();
    const PairResponse te = pair_response(cell.psi_e.y(), cell.psi_m.x(), k0);
    const PairResponse tm = pair_response(cell.psi_e.x(), cell.psi_m.y(), k0);
    ReflectionTensor r;
    r.te_te = te.r;
    r.tm_tm = tm.r;
    r.t_te = te.t;
    r.t_tm = tm.t;
    return r;
}

SusceptibilityCell susceptibility_from_reflection(const ReflectionTensor& r, const Transmission& t,
                                                  const em::PlaneWave& wave)
{
    require_normal_incidence(wave);
    const double k0 = wave.k0();
    SusceptibilityCell c;
    c.psi_e.y() = pair_inverse(t.te + r.te_te - 1.0, t.te + r.te_te + 1.0, k0);
    c.psi_m.x() = pair_inverse(t.te - r.te_te - 1.0, t.te - r.te_te + 1.0, k0);
    c.psi_e.x() = pair_inverse(t.tm + r.tm_tm - 1.0, t.tm + r.tm_tm + 1.0, k0);
    c.psi_m.y() = pair_inverse(t.tm - r.tm_tm - 1.0, t.tm - r.tm_tm + 1.0, k0);
    return c;
}

SusceptibilityCell susceptibility_from_reflection(const ReflectionTensor& r, const em::PlaneWave& wave)
{
    return susceptibility_from_reflection(r, Transmission{}, wave);
}

std::vector<AveragedFields> averaged_fields(const SusceptibilityField& field, const em::PlaneWave& wave)
{
    require_normal_incidence(wave);
    const em::Lattice& lat = field.lattice;
    const em::IncidentBasis basis = em::incident_basis(wave);
    const Vec3 k_hat = basis.k_inc.normalized();
    // closed-form cell integral of exp(-j k.r) relative to the centre value
    const double cell_factor = sinc(0.5 * basis.k_inc.x() * lat.dx) * sinc(0.5 * basis.k_inc.y() * lat.dy);

    std::vector<AveragedFields> out(lat.size());
    for (int q = 0; q < lat.Q; ++q) {
        for (int p = 0; p < lat.P; ++p) {
            const int idx = lat.index(p, q);
            const ReflectionTensor r = reflection_from_susceptibility(field.cells[idx], wave);
            const em::IncidentFields inc = em::incident_fields(wave, lat.center(p, q));
            const CVec3 e_ref = apply_tensor(r, basis.e_te, basis.e_tm, inc.e);
            const CVec3 kxh = cross(k_hat.cast<cplx>(), inc.h);
            const CVec3 h_ref = cross(k_hat.cast<cplx>(), apply_tensor(r, basis.e_te, basis.e_tm, kxh));
            out[idx].e = 0.5 * cell_factor * (inc.e + e_ref);
            out[idx].h = 0.5 * cell_factor * (inc.h + h_ref);
        }
    }
    return out;
}

std::vector<PolarizationDensities> polarization_densities(const SusceptibilityField& field,
                                                          const std::vector<AveragedFields>& averaged)
{
    if (averaged.size() != field.cells.size())
        throw Error(Errc::invalid_argument, "averaged fields do not match the susceptibility field");
    std::vector<PolarizationDensities> out(field.cells.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].s_e = kEps0 * field.cells[i].psi_e.cwiseProduct(averaged[i].e);
        out[i].s_m = field.cells[i].psi_m.cwiseProduct(averaged[i].h);
    }
    return out;
}

namespace {

// Central differences, one-sided on the rim.
cplx diff(const std::vector<cplx>& f, const em::Lattice& lat, int p, int q, bool along_x)
{
    const int n = along_x ? lat.P : lat.Q;
    const int i = along_x ? p : q;
    if (n == 1) return 0.0;
    const double h = along_x ? lat.dx : lat.dy;
    auto at = [&](int k) { return along_x ? f[lat.index(k, q)] : f[lat.index(p, k)]; };
    if (i == 0) return (at(1) - at(0)) / h;
    if (i == n - 1) return (at(n - 1) - at(n - 2)) / h;
    return (at(i + 1) - at(i - 1)) / (2.0 * h);
}

} // namespace

SurfaceCurrentField surface_currents(const SusceptibilityField& field, const em::PlaneWave& wave)
{
    const em::Lattice& lat = field.lattice;
    const std::vector<PolarizationDensities> dens = polarization_densities(field, averaged_fields(field, wave));
    const double omega = wave.omega();
    const CVec3 n_hat = Vec3::UnitZ().cast<cplx>();

    std::vector<cplx> se_n(lat.size()), sm_n(lat.size());
    for (int i = 0; i < lat.size(); ++i) {
        se_n[i] = dens[i].s_e.z();
        sm_n[i] = dens[i].s_m.z();
    }

    SurfaceCurrentField out(lat);
    for (int q = 0; q < lat.Q; ++q) {
        for (int p = 0; p < lat.P; ++p) {
            const int idx = lat.index(p, q);
            // S_t = S x n
            const CVec3 se_t = cross(dens[idx].s_e, n_hat);
            const CVec3 sm_t = cross(dens[idx].s_m, n_hat);
            const CVec3 grad_se(diff(se_n, lat, p, q, true), diff(se_n, lat, p, q, false), 0.0);
            const CVec3 grad_sm(diff(sm_n, lat, p, q, true), diff(sm_n, lat, p, q, false), 0.0);

            const CVec3 je = kJ * omega * se_t - cross(n_hat, grad_sm);
            const CVec3 jm = kJ * omega * kMu0 * sm_t + cross(n_hat, grad_se) / kEps0;
            const CVec3 jtot = cross(n_hat, kEta0 * cross(n_hat, je) + jm);
            out.j[idx] = CVec2(jtot.x(), jtot.y());
        }
    }
    return out;
}

} // namespace spss::gstc
