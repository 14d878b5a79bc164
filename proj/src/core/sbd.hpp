// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mapping.hpp"

namespace spss::sbd {

struct SbdConfig {
    int swarm = 10;        // A
    int iterations = 10000; // N
    std::uint64_t seed = 1;
    double inertia = 0.7298;
    double c1 = 1.49618;
    double c2 = 1.49618;
    double v_clamp = 0.5;  // fraction of the box width

    void validate() const;
};

struct ForwardContext {
    em::PlaneWave wave;
    em::Lattice lattice;
    const surrogate::WindowPredictor* twin = nullptr;
};

gstc::SurfaceCurrentField forward_currents(const mapping::LayoutDescriptors& g, const ForwardContext& ctx);

// dx dy sum |a - b|^2
double mismatch(const gstc::SurfaceCurrentField& a, const gstc::SurfaceCurrentField& b);

double current_mismatch(const mapping::LayoutDescriptors& g, const gstc::SurfaceCurrentField& j_ref,
                        const ForwardContext& ctx);

using Cost = std::function<double(const std::vector<double>&)>;

struct PsoResult {
    std::vector<double> best;
    double best_value = 0.0;
    std::vector<double> history; // best value after each iteration, length N
    long long evaluations = 0;
};

// Global-best PSO with reflecting walls. Iteration 1 evaluates the initial
// swarm; `seeds` replace the leading random particles.
PsoResult pso_optimize(const Cost& cost, const std::vector<double>& lo, const std::vector<double>& hi,
                       const SbdConfig& cfg, const std::vector<std::vector<double>>& seeds = {});

} // namespace spss::sbd
