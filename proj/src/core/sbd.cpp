// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "sbd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "rng.hpp"

namespace spss::sbd {

void SbdConfig::validate() const
{
    if (swarm < 2) throw Error(Errc::config, "sbd.A must be at least 2");
    if (iterations < 1) throw Error(Errc::config, "sbd.N must be at least 1");
    if (!(inertia > 0.0 && inertia < 1.0)) throw Error(Errc::config, "sbd.inertia must lie in (0, 1)");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw Error(Errc::config, "sbd.c1 and sbd.c2 must be positive");
    if (!(v_clamp > 0.0 && v_clamp <= 1.0)) throw Error(Errc::config, "sbd.v_clamp must lie in (0, 1]");
}

gstc::SurfaceCurrentField forward_currents(const mapping::LayoutDescriptors& g, const ForwardContext& ctx)
{
    if (!ctx.twin) throw Error(Errc::invalid_argument, "forward context has no surrogate");
    return gstc::surface_currents(mapping::full_scale_susceptibilities(g, *ctx.twin, ctx.lattice), ctx.wave);
}

double mismatch(const gstc::SurfaceCurrentField& a, const gstc::SurfaceCurrentField& b)
{
    if (a.lattice.P != b.lattice.P || a.lattice.Q != b.lattice.Q)
        throw Error(Errc::invalid_argument, "current fields live on different lattices");
    double s = 0.0;
    for (std::size_t i = 0; i < a.j.size(); ++i) s += (a.j[i] - b.j[i]).squaredNorm();
    return a.lattice.cell_area() * s;
}

double current_mismatch(const mapping::LayoutDescriptors& g, const gstc::SurfaceCurrentField& j_ref,
                        const ForwardContext& ctx)
{
    return mismatch(forward_currents(g, ctx), j_ref);
}

PsoResult pso_optimize(const Cost& cost, const std::vector<double>& lo, const std::vector<double>& hi,
                       const SbdConfig& cfg, const std::vector<std::vector<double>>& seeds)
{
    cfg.validate();
    const std::size_t dim = lo.size();
    if (dim == 0 || hi.size() != dim) throw Error(Errc::invalid_argument, "PSO box needs matching non-empty bounds");
    for (std::size_t k = 0; k < dim; ++k)
        if (!(hi[k] > lo[k])) throw Error(Errc::invalid_argument, "PSO box must satisfy lo < hi");
    if (static_cast<int>(seeds.size()) > cfg.swarm) throw Error(Errc::invalid_argument, "more seed particles than the swarm holds");

    const int A = cfg.swarm;
    Rng rng(cfg.seed);
    std::vector<std::vector<double>> x(A, std::vector<double>(dim)), v(A, std::vector<double>(dim, 0.0));
    for (int a = 0; a < A; ++a)
        for (std::size_t k = 0; k < dim; ++k) x[a][k] = uniform(rng, lo[k], hi[k]);
    for (std::size_t a = 0; a < seeds.size(); ++a) {
        if (seeds[a].size() != dim) throw Error(Errc::invalid_argument, "seed particle has the wrong dimension");
        for (std::size_t k = 0; k < dim; ++k) x[a][k] = std::clamp(seeds[a][k], lo[k], hi[k]);
    }

    std::vector<double> vmax(dim);
    for (std::size_t k = 0; k < dim; ++k) vmax[k] = cfg.v_clamp * (hi[k] - lo[k]);

    std::vector<double> f(A);
    auto evaluate = [&] {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (int a = 0; a < A; ++a) f[a] = cost(x[a]);
    };

    PsoResult res;
    evaluate();
    res.evaluations = A;
    std::vector<std::vector<double>> pbest = x;
    std::vector<double> pbest_f = f;
    int g = 0;
    for (int a = 1; a < A; ++a)
        if (f[a] < f[g]) g = a;
    res.best = x[g];
    res.best_value = f[g];
    res.history.push_back(res.best_value);

    for (int n = 2; n <= cfg.iterations; ++n) {
        for (int a = 0; a < A; ++a) {
            for (std::size_t k = 0; k < dim; ++k) {
                const double r1 = uniform01(rng);
                const double r2 = uniform01(rng);
                double vk = cfg.inertia * v[a][k] + cfg.c1 * r1 * (pbest[a][k] - x[a][k]) +
                            cfg.c2 * r2 * (res.best[k] - x[a][k]);
                vk = std::clamp(vk, -vmax[k], vmax[k]);
                double xk = x[a][k] + vk;
                if (xk > hi[k]) {
                    xk = hi[k] - (xk - hi[k]);
                    vk = -vk;
                } else if (xk < lo[k]) {
                    xk = lo[k] + (lo[k] - xk);
                    vk = -vk;
                }
                x[a][k] = std::clamp(xk, lo[k], hi[k]);
                v[a][k] = vk;
            }
        }
        evaluate();
        res.evaluations += A;
        for (int a = 0; a < A; ++a) {
            if (f[a] < pbest_f[a]) {
                pbest_f[a] = f[a];
                pbest[a] = x[a];
            }
            if (f[a] < res.best_value) {
                res.best_value = f[a];
                res.best = x[a];
            }
        }
        res.history.push_back(res.best_value);
    }
    return res;
}

} // namespace spss::sbd
