// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "ipt.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"
#include "rng.hpp"

namespace spss::ipt {

void IptConfig::validate() const
{
    if (!(gamma > 0.0)) throw Error(Errc::config, "ipt.gamma must be positive");
    if (max_iterations < 1) throw Error(Errc::config, "ipt.I must be at least 1");
    if (!(magnitude > 0.0)) throw Error(Errc::config, "ipt.C must be positive");
    if (!(svd_cutoff > 0.0 && svd_cutoff < 1.0)) throw Error(Errc::config, "ipt.svd_cutoff must lie in (0, 1)");
}

namespace {

Vec3 theta_hat(const em::Direction& d)
{
    return {std::cos(d.theta) * std::cos(d.phi), std::cos(d.theta) * std::sin(d.phi), -std::sin(d.theta)};
}

// f / |f| with the largest component made real and positive
CVec3 zero_phase(const CVec3& f)
{
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(f(i)) > std::abs(f(k))) k = i;
    return f / f.norm() * std::polar(1.0, -std::arg(f(k)));
}

} // namespace

radiation::FarFieldGrid project_pattern(const radiation::FarFieldGrid& far, const radiation::CoverageMask& mask,
                                        PatternRule rule)
{
    mask.validate();
    radiation::FarFieldGrid out = far;
    for (std::size_t m = 0; m < mask.size(); ++m) {
        const int s = far.locate(mask.dirs[m]);
        if (s < 0) throw Error(Errc::invalid_argument, "mask direction is not a sample of the pattern");
        CVec3& f = out.samples[s].f;
        const double level = mask.level[m];
        const double mag = f.norm();
        if (mag * mag >= level) continue;
        const double target = std::sqrt(level);
        if (mag == 0.0)
            f = target * theta_hat(mask.dirs[m]).cast<cplx>();
        else if (rule == PatternRule::keep_phase)
            f *= target / mag;
        else
            f = target * zero_phase(f);
    }
    return out;
}

void project_samples(std::vector<cplx>& y, const std::vector<double>& level, PatternRule rule)
{
    if (y.size() != level.size()) throw Error(Errc::invalid_argument, "pattern and mask sizes differ");
    for (std::size_t m = 0; m < y.size(); ++m) {
        const double mag = std::abs(y[m]);
        if (mag * mag >= level[m]) continue;
        const double target = std::sqrt(level[m]);
        if (rule == PatternRule::keep_phase && mag > 0.0)
            y[m] *= target / mag;
        else
            y[m] = target;
    }
}

double matching_index(const std::vector<cplx>& projected, const std::vector<cplx>& field)
{
    if (projected.size() != field.size()) throw Error(Errc::invalid_argument, "pattern sizes differ");
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < field.size(); ++m) {
        num += std::norm(projected[m] - field[m]);
        den += std::norm(field[m]);
    }
    if (num == 0.0) return 0.0;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

MinNormSolver::MinNormSolver(const Eigen::MatrixXcd& op, double cutoff)
{
    if (op.size() == 0) throw Error(Errc::degenerate_operator, "empty operator");
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    sigma_max_ = sv.size() > 0 ? sv(0) : 0.0;
    if (!(sigma_max_ > 0.0)) throw Error(Errc::degenerate_operator, "operator has no non-zero singular value");
    int r = 0;
    while (r < sv.size() && sv(r) >= cutoff * sigma_max_) ++r;
    u_ = svd.matrixU().leftCols(r);
    v_ = svd.matrixV().leftCols(r);
    sigma_inv_ = sv.head(r).cwiseInverse();
}

Eigen::VectorXcd MinNormSolver::solve(const Eigen::VectorXcd& rhs) const
{
    if (rhs.size() != u_.rows()) throw Error(Errc::invalid_argument, "right-hand side does not match the operator");
    const Eigen::VectorXcd c = (u_.adjoint() * rhs).cwiseProduct(sigma_inv_.cast<cplx>());
    return v_ * c;
}

Eigen::VectorXcd tsvd_min_norm(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& rhs, double cutoff)
{
    return MinNormSolver(op, cutoff).solve(rhs);
}

CVec2 current_polarization(const em::PlaneWave& wave)
{
    gstc::ReflectionTensor r;
    r.te_te = 0.5;
    r.tm_tm = 0.5;
    gstc::SusceptibilityField probe(em::Lattice{1, 1, 0.01, 0.01});
    probe.cells[0] = gstc::susceptibility_from_reflection(r, wave);
    const CVec2 j = gstc::surface_currents(probe, wave).j[0];
    const double n = j.norm();
    if (!(n > 0.0)) throw Error(Errc::degenerate_operator, "incident wave induces no tangential current");
    const int k = std::abs(j(1)) > std::abs(j(0)) ? 1 : 0;
    return j / n * std::polar(1.0, -std::arg(j(k)));
}

MaskOperator mask_operator(const em::Lattice& lat, double k0, const CVec2& p_hat,
                           const std::vector<em::Direction>& dirs)
{
    lat.validate();
    MaskOperator op;
    op.a.resize(static_cast<Eigen::Index>(dirs.size()), lat.size());
    op.pol.resize(dirs.size());
    const CVec3 p3(p_hat.x(), p_hat.y(), 0.0);
    for (std::size_t m = 0; m < dirs.size(); ++m) {
        const em::Direction& d = dirs[m];
        const CVec3 g = radiation::transverse(d.unit(), p3);
        const double gn = g.norm();
        op.pol[m] = gn > 0.0 ? CVec3(g / gn) : CVec3(theta_hat(d).cast<cplx>());
        const double u = d.u();
        const double v = d.v();
        const cplx pref = gn * kJ * k0 / (4.0 * kPi) * radiation::cell_factor(lat, k0, u, v);
        for (int q = 0; q < lat.Q; ++q)
            for (int p = 0; p < lat.P; ++p)
                op.a(static_cast<Eigen::Index>(m), lat.index(p, q)) =
                    pref * std::exp(kJ * (k0 * (u * lat.x(p) + v * lat.y(q))));
    }
    return op;
}

double mask_level(const em::Lattice& lat, double k0, const CVec2& p_hat, double magnitude, double level_db)
{
    return std::pow(10.0, level_db / 10.0) * radiation::uniform_peak_power(lat, k0, p_hat, magnitude);
}

IptResult ipt_run(const radiation::CoverageMask& mask, const em::Lattice& lat, const em::PlaneWave& wave,
                  const IptConfig& cfg)
{
    cfg.validate();
    mask.validate();
    const double k0 = wave.k0();
    const CVec2 p_hat = current_polarization(wave);
    const MaskOperator op = mask_operator(lat, k0, p_hat, mask.dirs);
    const MinNormSolver solver(op.a, cfg.svd_cutoff);

    const int n = lat.size();
    Rng rng(cfg.seed);
    Eigen::VectorXcd s(n);
    for (int i = 0; i < n; ++i) s(i) = std::polar(cfg.magnitude, 2.0 * kPi * uniform01(rng));

    IptResult res;
    std::vector<cplx> y(mask.size()), y_proj;
    for (int it = 1; it <= cfg.max_iterations; ++it) {
        const Eigen::VectorXcd f = op.a * s;
        for (std::size_t m = 0; m < y.size(); ++m) y[m] = f(static_cast<Eigen::Index>(m));
        y_proj = y;
        project_samples(y_proj, mask.level, cfg.rule);
        const double g = matching_index(y_proj, y);
        res.gamma_history.push_back(g);
        res.iterations_run = it;
        if (g <= cfg.gamma) {
            res.termination = Termination::converged;
            break;
        }
        if (it == cfg.max_iterations) break;

        const Eigen::VectorXcd s_mn =
            solver.solve(Eigen::Map<const Eigen::VectorXcd>(y_proj.data(), static_cast<Eigen::Index>(y_proj.size())));
        if (cfg.projection == ProjectionMode::per_point_phase) {
            for (int i = 0; i < n; ++i)
                s(i) = std::abs(s_mn(i)) > 0.0 ? std::polar(cfg.magnitude, std::arg(s_mn(i))) : cplx(cfg.magnitude, 0.0);
        } else {
            const double norm = s_mn.norm();
            if (!(norm > 0.0)) throw Error(Errc::degenerate_operator, "minimum-norm current vanished");
            s = s_mn * (cfg.magnitude * std::sqrt(static_cast<double>(n)) / norm);
        }
    }

    res.j_opt = gstc::SurfaceCurrentField(lat);
    for (int i = 0; i < n; ++i) res.j_opt.j[i] = s(i) * p_hat;
    return res;
}

} // namespace spss::ipt
