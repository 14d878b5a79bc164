// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "radiation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "error.hpp"

namespace spss::radiation {

namespace {

constexpr double kRimGuard = 1e-9;
constexpr double kFloorDb = -200.0;

double to_db(double x) { return x > 0.0 ? std::max(10.0 * std::log10(x), kFloorDb) : kFloorDb; }

} // namespace

double nyquist_du(const em::Lattice& lat, double wavelength) { return wavelength / (2.0 * lat.P * lat.dx); }
double nyquist_dv(const em::Lattice& lat, double wavelength) { return wavelength / (2.0 * lat.Q * lat.dy); }

UvGridSpec UvGridSpec::nyquist(const em::Lattice& lat, double wavelength, double oversampling)
{
    if (!(oversampling > 0.0)) throw Error(Errc::invalid_argument, "oversampling must be positive");
    UvGridSpec g;
    g.n_u = static_cast<int>(std::ceil(2.0 * oversampling / nyquist_du(lat, wavelength)));
    g.n_v = static_cast<int>(std::ceil(2.0 * oversampling / nyquist_dv(lat, wavelength)));
    g.n_u = std::max(g.n_u, 8);
    g.n_v = std::max(g.n_v, 8);
    return g;
}

int FarFieldGrid::find_grid(int i, int k) const
{
    if (i < 0 || k < 0 || i >= grid.n_u || k >= grid.n_v) return -1;
    return lookup[static_cast<std::size_t>(i) + static_cast<std::size_t>(grid.n_u) * k];
}

int FarFieldGrid::locate(const em::Direction& dir, bool grid_only) const
{
    const double u = dir.u();
    const double v = dir.v();
    auto hit = [&](const FarFieldSample& s) { return std::abs(s.u - u) <= 1e-9 && std::abs(s.v - v) <= 1e-9; };
    if (!lookup.empty()) {
        const int s = find_grid(static_cast<int>(std::floor((u + 1.0) / grid.du())),
                                static_cast<int>(std::floor((v + 1.0) / grid.dv())));
        if (s >= 0 && hit(samples[s])) return s;
    }
    if (!grid_only)
        for (std::size_t s = n_grid; s < samples.size(); ++s)
            if (hit(samples[s])) return static_cast<int>(s);
    return -1;
}

const FarFieldSample& FarFieldGrid::nearest(const em::Direction& dir) const
{
    if (samples.empty()) throw Error(Errc::invalid_argument, "empty far-field grid");
    std::size_t best = 0;
    double best_sep = std::numeric_limits<double>::infinity();
    for (std::size_t s = n_grid; s < samples.size(); ++s) {
        const double sep = em::angular_separation(samples[s].dir, dir);
        if (sep < best_sep) { best_sep = sep; best = s; }
    }
    if (!lookup.empty()) {
        const int i = static_cast<int>(std::floor((dir.u() + 1.0) / grid.du()));
        const int k = static_cast<int>(std::floor((dir.v() + 1.0) / grid.dv()));
        for (int di = -1; di <= 1; ++di) {
            for (int dk = -1; dk <= 1; ++dk) {
                const int s = find_grid(i + di, k + dk);
                if (s < 0) continue;
                const double sep = em::angular_separation(samples[s].dir, dir);
                if (sep < best_sep) { best_sep = sep; best = static_cast<std::size_t>(s); }
            }
        }
    }
    if (!std::isfinite(best_sep)) throw Error(Errc::invalid_argument, "direction not covered by the far-field grid");
    return samples[best];
}

double cell_factor(const em::Lattice& lat, double k0, double u, double v)
{
    return lat.dx * lat.dy * sinc(0.5 * k0 * u * lat.dx) * sinc(0.5 * k0 * v * lat.dy);
}

CVec3 transverse(const Vec3& r_hat, const CVec3& f)
{
    const CVec3 r = r_hat.cast<cplx>();
    return f - r * (r.transpose() * f)(0);
}

FarFieldOperator::FarFieldOperator(const gstc::SurfaceCurrentField& currents, double k0)
    : currents_(currents), k0_(k0)
{
    currents_.lattice.validate();
}

CVec3 FarFieldOperator::evaluate(const em::Direction& dir) const
{
    const em::Lattice& lat = currents_.lattice;
    const double u = dir.u();
    const double v = dir.v();
    cplx ax = 0.0, ay = 0.0;
    for (int q = 0; q < lat.Q; ++q) {
        for (int p = 0; p < lat.P; ++p) {
            const cplx ph = std::exp(kJ * (k0_ * (u * lat.x(p) + v * lat.y(q))));
            const CVec2& j = currents_.at(p, q);
            ax += j.x() * ph;
            ay += j.y() * ph;
        }
    }
    const cplx pref = kJ * k0_ / (4.0 * kPi) * cell_factor(lat, k0_, u, v);
    return transverse(dir.unit(), pref * CVec3(ax, ay, 0.0));
}

double cell_solid_angle(const UvGridSpec& grid, int i, int k)
{
    // 8-point Gauss-Legendre on [-1, 1]
    static constexpr double x[4] = {0.18343464249564980, 0.52553240991632899, 0.79666647741362674, 0.96028985649753623};
    static constexpr double w[4] = {0.36268378337836198, 0.31370664587788729, 0.22238103445337447, 0.10122853629037626};
    const double u1 = std::max(-1.0 + (i) * grid.du(), -1.0), u2 = std::min(-1.0 + (i + 1) * grid.du(), 1.0);
    const double v1 = -1.0 + k * grid.dv(), v2 = -1.0 + (k + 1) * grid.dv();
    auto inner = [&](double u) {
        const double a2 = 1.0 - u * u;
        if (a2 <= 0.0) return 0.0;
        const double a = std::sqrt(a2);
        const double lo = std::clamp(v1, -a, a), hi = std::clamp(v2, -a, a);
        return std::asin(hi / a) - std::asin(lo / a);
    };
    const bool rim = std::max(u1 * u1, u2 * u2) + std::max(v1 * v1, v2 * v2) > 1.0;
    const int pieces = rim ? 64 : 1;
    const double h = (u2 - u1) / pieces;
    double sum = 0.0;
    for (int n = 0; n < pieces; ++n) {
        const double c = u1 + (n + 0.5) * h;
        for (int j = 0; j < 4; ++j) sum += w[j] * (inner(c - 0.5 * h * x[j]) + inner(c + 0.5 * h * x[j]));
    }
    return 0.5 * h * sum;
}

namespace {

// Centroid of the part of a rim cell inside the visible disk, on a 16 x 16
// sub-grid; empty when no sub-cell is visible.
std::optional<std::pair<double, double>> visible_centroid(const UvGridSpec& grid, int i, int k)
{
    constexpr int n = 16;
    const double u0 = -1.0 + i * grid.du(), v0 = -1.0 + k * grid.dv();
    double su = 0.0, sv = 0.0;
    int count = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const double u = u0 + (a + 0.5) * grid.du() / n, v = v0 + (b + 0.5) * grid.dv() / n;
            if (u * u + v * v >= 1.0 - kRimGuard) continue;
            su += u;
            sv += v;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return std::make_pair(su / count, sv / count);
}

} // namespace

FarFieldGrid far_field(const gstc::SurfaceCurrentField& currents, double k0, const FarFieldSpec& spec)
{
    const em::Lattice& lat = currents.lattice;
    lat.validate();
    if (spec.grid.n_u < 1 || spec.grid.n_v < 1) throw Error(Errc::invalid_argument, "empty far-field grid spec");

    FarFieldGrid out;
    out.grid = spec.grid;
    out.k0 = k0;
    out.normalization = k0 / (4.0 * kPi);
    const double wavelength = 2.0 * kPi / k0;
    out.nyquist_ok = spec.grid.du() <= nyquist_du(lat, wavelength) * (1.0 + 1e-12) &&
                     spec.grid.dv() <= nyquist_dv(lat, wavelength) * (1.0 + 1e-12);
    if (!out.nyquist_ok && spec.strict_nyquist)
        throw Error(Errc::grid_too_coarse, "far-field grid is coarser than the aperture's Nyquist step");

    const int nu = spec.grid.n_u;
    const int nv = spec.grid.n_v;

    // separable array factor: A = Eu * J * Ev^T
    Eigen::MatrixXcd eu(nu, lat.P), ev(nv, lat.Q);
    for (int i = 0; i < nu; ++i)
        for (int p = 0; p < lat.P; ++p) eu(i, p) = std::exp(kJ * (k0 * spec.grid.u_at(i) * lat.x(p)));
    for (int k = 0; k < nv; ++k)
        for (int q = 0; q < lat.Q; ++q) ev(k, q) = std::exp(kJ * (k0 * spec.grid.v_at(k) * lat.y(q)));
    Eigen::MatrixXcd jx(lat.P, lat.Q), jy(lat.P, lat.Q);
    for (int q = 0; q < lat.Q; ++q) {
        for (int p = 0; p < lat.P; ++p) {
            jx(p, q) = currents.at(p, q).x();
            jy(p, q) = currents.at(p, q).y();
        }
    }
    const Eigen::MatrixXcd ax = eu * (jx * ev.transpose());
    const Eigen::MatrixXcd ay = eu * (jy * ev.transpose());

    out.lookup.assign(static_cast<std::size_t>(nu) * nv, -1);
    const FarFieldOperator op(currents, k0);
    for (int k = 0; k < nv; ++k) {
        for (int i = 0; i < nu; ++i) {
            double u = spec.grid.u_at(i);
            double v = spec.grid.v_at(k);
            const bool rim = u * u + v * v >= 1.0 - kRimGuard;
            if (rim) {
                const auto c = visible_centroid(spec.grid, i, k);
                if (!c) continue;
                u = c->first;
                v = c->second;
            }
            FarFieldSample s;
            s.u = u;
            s.v = v;
            s.dir = em::Direction::from_uv(u, v);
            s.solid_angle = cell_solid_angle(spec.grid, i, k);
            s.grid_i = i;
            s.grid_k = k;
            if (rim) {
                s.f = op.evaluate(s.dir);
            } else {
                const cplx pref = kJ * k0 / (4.0 * kPi) * cell_factor(lat, k0, u, v);
                s.f = transverse(s.dir.unit(), pref * CVec3(ax(i, k), ay(i, k), 0.0));
            }
            out.lookup[static_cast<std::size_t>(i) + static_cast<std::size_t>(nu) * k] = static_cast<int>(out.samples.size());
            out.samples.push_back(s);
        }
    }
    out.n_grid = out.samples.size();

    for (const em::Direction& d : spec.probes) {
        FarFieldSample s;
        s.dir = d;
        s.u = d.u();
        s.v = d.v();
        s.f = op.evaluate(d);
        out.samples.push_back(s);
    }
    return out;
}

void CoverageMask::validate() const
{
    if (dirs.empty()) throw Error(Errc::invalid_argument, "coverage region is empty");
    if (dirs.size() != level.size()) throw Error(Errc::invalid_argument, "mask levels do not match mask directions");
    for (double m : level)
        if (!(m >= 0.0)) throw Error(Errc::invalid_argument, "mask levels must be non-negative");
}

bool contains(const Polygon& poly, const em::GroundPoint& g)
{
    bool inside = false;
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t a = 0, b = n - 1; a < n; b = a++) {
        const em::GroundPoint& pa = poly[a];
        const em::GroundPoint& pb = poly[b];
        if ((pa.y > g.y) != (pb.y > g.y)) {
            const double x_cross = pa.x + (g.y - pa.y) * (pb.x - pa.x) / (pb.y - pa.y);
            if (g.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

CoverageMask pencil_mask(const em::Direction& target, double level)
{
    CoverageMask m;
    m.dirs.push_back(target);
    m.level.push_back(level);
    return m;
}

CoverageMask shaped_mask(const std::vector<Polygon>& polygons, const em::Mounting& mount,
                         const UvGridSpec& grid, double level)
{
    CoverageMask m;
    for (int k = 0; k < grid.n_v; ++k) {
        const double v = grid.v_at(k);
        for (int i = 0; i < grid.n_u; ++i) {
            const double u = grid.u_at(i);
            if (u * u + v * v >= 1.0 - kRimGuard) continue;
            const em::Direction d = em::Direction::from_uv(u, v);
            const Vec3 g = mount.to_global(d.unit());
            if (!(g.z() < -1e-12)) continue; // never reaches the ground
            const em::GroundPoint hit = em::footprint_point(d, mount);
            for (const Polygon& poly : polygons) {
                if (contains(poly, hit)) {
                    m.dirs.push_back(d);
                    m.level.push_back(level);
                    break;
                }
            }
        }
    }
    return m;
}

double uniform_peak_power(const em::Lattice& lat, double k0, const CVec2& polarization, double magnitude)
{
    const double amp = k0 / (4.0 * kPi) * lat.size() * lat.cell_area() * magnitude;
    return amp * amp * polarization.squaredNorm();
}

void GroundWindow::validate() const
{
    if (nx < 1 || ny < 1) throw Error(Errc::invalid_argument, "ground window needs at least one point per axis");
    if (!(x_max > x_min) && nx > 1) throw Error(Errc::invalid_argument, "degenerate ground window along x");
    if (!(y_max > y_min) && ny > 1) throw Error(Errc::invalid_argument, "degenerate ground window along y");
}

FootprintMap footprint(const FarFieldOperator& op, const em::Mounting& mount, const GroundWindow& window,
                       Spreading spreading)
{
    window.validate();
    mount.validate();
    FootprintMap map;
    map.window = window;
    map.power.assign(static_cast<std::size_t>(window.nx) * window.ny, 0.0);
    double peak = 0.0;
    std::size_t peak_idx = 0;
    for (int iy = 0; iy < window.ny; ++iy) {
        for (int ix = 0; ix < window.nx; ++ix) {
            const em::GroundPoint g{window.x_at(ix), window.y_at(iy)};
            const em::GroundRay ray = em::ground_ray(g, mount);
            double p = 0.0;
            if (ray.in_front) {
                p = op.evaluate(ray.dir).squaredNorm();
                if (spreading == Spreading::inverse_square) p /= ray.distance * ray.distance;
            }
            const std::size_t idx = static_cast<std::size_t>(ix) + static_cast<std::size_t>(window.nx) * iy;
            map.power[idx] = p;
            if (p > peak) {
                peak = p;
                peak_idx = idx;
            }
        }
    }
    map.peak_linear = peak;
    map.peak = {window.x_at(static_cast<int>(peak_idx % window.nx)), window.y_at(static_cast<int>(peak_idx / window.nx))};
    map.power_db.resize(map.power.size());
    for (std::size_t i = 0; i < map.power.size(); ++i) {
        if (peak > 0.0) map.power[i] /= peak;
        map.power_db[i] = to_db(map.power[i]);
    }
    return map;
}

double radiated_power(const FarFieldGrid& far)
{
    double total = 0.0;
    for (std::size_t s = 0; s < far.n_grid; ++s) total += far.samples[s].f.squaredNorm() * far.samples[s].solid_angle;
    return total;
}

double directivity_pencil(const FarFieldGrid& far, const em::Direction& target)
{
    const double total = radiated_power(far);
    if (!(total > 0.0)) throw Error(Errc::invalid_argument, "far field carries no power");
    const double peak = far.nearest(target).f.squaredNorm();
    return to_db(4.0 * kPi * peak / total);
}

double directivity_shaped(const FarFieldGrid& far, const CoverageMask& mask)
{
    mask.validate();
    const double total = radiated_power(far);
    if (!(total > 0.0)) throw Error(Errc::invalid_argument, "far field carries no power");
    double inside = 0.0;
    double omega = 0.0;
    std::vector<char> seen(far.n_grid, 0);
    for (const em::Direction& d : mask.dirs) {
        const int s = far.locate(d, true);
        if (s < 0) throw Error(Errc::invalid_argument, "mask direction is not a node of the far-field grid");
        const FarFieldSample& smp = far.samples[s];
        if (seen[s]) continue;
        seen[s] = 1;
        inside += smp.f.squaredNorm() * smp.solid_angle;
        omega += smp.solid_angle;
    }
    return to_db(4.0 * kPi / omega * inside / total);
}

em::Direction peak_direction(const FarFieldGrid& far, const FarFieldOperator& op)
{
    if (far.n_grid == 0) throw Error(Errc::invalid_argument, "far-field grid has no quadrature nodes");
    std::size_t best = 0;
    for (std::size_t s = 1; s < far.n_grid; ++s)
        if (far.samples[s].f.squaredNorm() > far.samples[best].f.squaredNorm()) best = s;

    double u = far.samples[best].u;
    double v = far.samples[best].v;
    auto power = [&](double uu, double vv) {
        if (uu * uu + vv * vv >= 1.0 - kRimGuard) return -1.0;
        return op.evaluate(em::Direction::from_uv(uu, vv)).squaredNorm();
    };
    double f0 = power(u, v);
    double step = 0.5 * std::max(far.grid.du(), far.grid.dv());
    while (step > 1e-9) {
        bool moved = false;
        const double cand[4][2] = {{u + step, v}, {u - step, v}, {u, v + step}, {u, v - step}};
        for (const auto& c : cand) {
            const double f = power(c[0], c[1]);
            if (f > f0) {
                f0 = f;
                u = c[0];
                v = c[1];
                moved = true;
                break;
            }
        }
        if (!moved) step *= 0.5;
    }
    return em::Direction::from_uv(u, v);
}

} // namespace spss::radiation
