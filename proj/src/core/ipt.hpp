// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <cstdint>
#include <vector>

#include "radiation.hpp"

namespace spss::ipt {

enum class ProjectionMode { per_point_phase, global_normalize };

// keep_phase: deficient samples are lifted to sqrt(M) along F.
// literal: they are replaced by sqrt(M) times a zero-phase reference.
enum class PatternRule { keep_phase, literal };

struct IptConfig {
    double gamma = 1e-4;
    int max_iterations = 1000;
    double magnitude = 1.0;  // C
    double svd_cutoff = 1e-3;
    std::uint64_t seed = 1;
    ProjectionMode projection = ProjectionMode::per_point_phase;
    PatternRule rule = PatternRule::keep_phase;

    void validate() const;
};

enum class Termination { converged, max_iterations };

struct IptResult {
    gstc::SurfaceCurrentField j_opt;
    std::vector<double> gamma_history;
    int iterations_run = 0;
    Termination termination = Termination::max_iterations;
};

// Vector form on a sampled pattern. Mask directions must coincide with grid
// nodes or probes. Zero samples take theta-hat as the reference polarisation;
// otherwise the reference is F / |F| turned so its largest component is real.
radiation::FarFieldGrid project_pattern(const radiation::FarFieldGrid& far, const radiation::CoverageMask& mask,
                                        PatternRule rule = PatternRule::keep_phase);

// Scalar form used inside the loop.
void project_samples(std::vector<cplx>& y, const std::vector<double>& level, PatternRule rule);

// ||F~ - F|| / ||F||, 0 when both vanish.
double matching_index(const std::vector<cplx>& projected, const std::vector<cplx>& field);

// Pseudo-inverse with singular values below cutoff * sigma_max dropped,
// factorised once and reused.
class MinNormSolver {
public:
    MinNormSolver(const Eigen::MatrixXcd& op, double cutoff);

    Eigen::VectorXcd solve(const Eigen::VectorXcd& rhs) const;
    int rank() const { return static_cast<int>(sigma_inv_.size()); }
    double sigma_max() const { return sigma_max_; }

private:
    Eigen::MatrixXcd u_;
    Eigen::VectorXd sigma_inv_;
    Eigen::MatrixXcd v_;
    double sigma_max_ = 0.0;
};

Eigen::VectorXcd tsvd_min_norm(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& rhs, double cutoff);

// Unit polarisation of the currents a uniform isotropic skin carries under
// this wave; IPT currents are J = s * p_hat with complex scalar s per cell.
CVec2 current_polarization(const em::PlaneWave& wave);

// Rows: mask directions, scalar field along the transverse polarisation;
// columns: cells.
struct MaskOperator {
    Eigen::MatrixXcd a;
    std::vector<CVec3> pol; // unit transverse polarisation per row
};

MaskOperator mask_operator(const em::Lattice& lat, double k0, const CVec2& p_hat,
                           const std::vector<em::Direction>& dirs);

// Mask level for a dB value relative to the broadside peak of the uniform
// aperture carrying magnitude C along p_hat.
double mask_level(const em::Lattice& lat, double k0, const CVec2& p_hat, double magnitude, double level_db);

IptResult ipt_run(const radiation::CoverageMask& mask, const em::Lattice& lat, const em::PlaneWave& wave,
                  const IptConfig& cfg);

} // namespace spss::ipt
