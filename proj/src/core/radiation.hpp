// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <cstddef>
#include <vector>

#include "gstc.hpp"

namespace spss::radiation {

// Regular grid over [-1, 1]^2 in direction cosines. Each cell touching the
// visible disk carries one sample: its centre, or for rim cells the centroid
// of the visible part.
struct UvGridSpec {
    int n_u = 128;
    int n_v = 128;

    double du() const { return 2.0 / n_u; }
    double dv() const { return 2.0 / n_v; }
    double u_at(int i) const { return -1.0 + (i + 0.5) * du(); }
    double v_at(int k) const { return -1.0 + (k + 0.5) * dv(); }

    // Sampling `oversampling` times finer than lambda / (2 P dx), per axis.
    static UvGridSpec nyquist(const em::Lattice& lat, double wavelength, double oversampling);
};

// Largest steps allowed by the sampling theorem for this aperture.
double nyquist_du(const em::Lattice& lat, double wavelength);
double nyquist_dv(const em::Lattice& lat, double wavelength);

struct FarFieldSample {
    em::Direction dir;
    double u = 0.0;
    double v = 0.0;
    CVec3 f = CVec3::Zero();
    double solid_angle = 0.0; // quadrature weight (exact cell solid angle); zero for probes
    int grid_i = -1;          // grid indices, -1 for probes
    int grid_k = -1;
};

struct FarFieldSpec {
    UvGridSpec grid;
    std::vector<em::Direction> probes; // extra off-grid directions, e.g. a pencil target
    bool strict_nyquist = false;       // GridTooCoarse becomes an error instead of a flag
};

struct FarFieldGrid {
    UvGridSpec grid;
    double k0 = 0.0;
    double normalization = 0.0; // jk0/4pi prefactor magnitude
    bool nyquist_ok = true;
    std::size_t n_grid = 0;     // samples[0, n_grid) are quadrature nodes, the rest probes
    std::vector<FarFieldSample> samples;
    std::vector<int> lookup;    // grid (i + n_u*k) -> sample index or -1

    int find_grid(int i, int k) const;
    // Sample sitting exactly on dir (to 1e-9 in u, v), or -1.
    int locate(const em::Direction& dir, bool grid_only = false) const;
    // Sample nearest to dir among probes and grid nodes.
    const FarFieldSample& nearest(const em::Direction& dir) const;
};

// Far-field Green's operator on a pulse-basis current: unit reference
// distance, exp(-jk0 r)/r suppressed, transverse projection applied.
class FarFieldOperator {
public:
    FarFieldOperator(const gstc::SurfaceCurrentField& currents, double k0);

    CVec3 evaluate(const em::Direction& dir) const;
    double k0() const { return k0_; }
    const gstc::SurfaceCurrentField& currents() const { return currents_; }

private:
    gstc::SurfaceCurrentField currents_;
    double k0_;
};

// Closed-form pulse integral of exp(jk0 (u x + v y)) over one cell.
double cell_factor(const em::Lattice& lat, double k0, double u, double v);

// Projection onto the plane transverse to r_hat.
CVec3 transverse(const Vec3& r_hat, const CVec3& f);

FarFieldGrid far_field(const gstc::SurfaceCurrentField& currents, double k0, const FarFieldSpec& spec);

struct CoverageMask {
    std::vector<em::Direction> dirs;
    std::vector<double> level; // lower bound on |F|^2, linear

    std::size_t size() const { return dirs.size(); }
    void validate() const;
};

using Polygon = std::vector<em::GroundPoint>;

bool contains(const Polygon& poly, const em::GroundPoint& g);

CoverageMask pencil_mask(const em::Direction& target, double level);

// Rasterises ground polygons through the inverse mounting map at the grid's
// resolution: a grid direction belongs to the mask when its ground hit point
// falls inside any polygon.
CoverageMask shaped_mask(const std::vector<Polygon>& polygons, const em::Mounting& mount,
                         const UvGridSpec& grid, double level);

// |F|^2 at broadside of a uniform-phase aperture carrying magnitude C along
// the given polarisation; the reference for mask levels in dB.
double uniform_peak_power(const em::Lattice& lat, double k0, const CVec2& polarization, double magnitude);

enum class Spreading { inverse_square, none };

struct GroundWindow {
    double x_min = -60.0;
    double x_max = 60.0;
    double y_min = 0.0;
    double y_max = 60.0;
    int nx = 121;
    int ny = 61;

    double x_at(int i) const { return nx == 1 ? x_min : x_min + i * (x_max - x_min) / (nx - 1); }
    double y_at(int k) const { return ny == 1 ? y_min : y_min + k * (y_max - y_min) / (ny - 1); }
    void validate() const;
};

struct FootprintMap {
    GroundWindow window;
    std::vector<double> power;    // normalised to the peak, linear; index ix + nx*iy
    std::vector<double> power_db; // floored at -200 dB
    double peak_linear = 0.0;     // |F|^2 / rho^2 at the peak before normalisation
    em::GroundPoint peak;
};

FootprintMap footprint(const FarFieldOperator& op, const em::Mounting& mount, const GroundWindow& window,
                       Spreading spreading = Spreading::inverse_square);

// Average directivity towards a pencil target, dB.
double directivity_pencil(const FarFieldGrid& far, const em::Direction& target);

// Exact solid angle of grid cell (i, k) clipped to the visible disk; the
// quadrature weight of that cell's sample.
double cell_solid_angle(const UvGridSpec& grid, int i, int k);
// Average directivity over the mask region, dB. Mask directions must sit on
// the far-field grid.
double directivity_shaped(const FarFieldGrid& far, const CoverageMask& mask);

// Total radiated power by midpoint quadrature (sum |F|^2 dOmega).
double radiated_power(const FarFieldGrid& far);

// Grid-peak direction refined by a local pattern search on |F|^2.
em::Direction peak_direction(const FarFieldGrid& far, const FarFieldOperator& op);

} // namespace spss::radiation
