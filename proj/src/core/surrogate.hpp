// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gstc.hpp"
#include "rng.hpp"

namespace spss::surrogate {

// Per-descriptor box, one entry per d.
struct Bounds {
    std::vector<double> lo;
    std::vector<double> hi;

    int dims() const { return static_cast<int>(lo.size()); }
    double range(int d) const { return hi[d] - lo[d]; }
    void validate() const;
};

// Pp x Qp x D descriptors; zero-based index p + Pp*q + Pp*Qp*d.
struct SmallScaleLayout {
    int Pp = 5;
    int Qp = 5;
    int D = 1;
    std::vector<double> g;

    SmallScaleLayout() = default;
    SmallScaleLayout(int pp, int qp, int d) : Pp(pp), Qp(qp), D(d), g(static_cast<std::size_t>(pp) * qp * d, 0.0) {}

    int cells() const { return Pp * Qp; }
    int size() const { return Pp * Qp * D; }
    int index(int p, int q, int d) const { return p + Pp * q + Pp * Qp * d; }
    double at(int p, int q, int d) const { return g[index(p, q, d)]; }
    double& at(int p, int q, int d) { return g[index(p, q, d)]; }
    void validate(const Bounds& b) const;
};

// Coupled-resonator stand-in for the small-scale full-wave solver.
struct OracleParams {
    double l_res = 0.025;  // m
    double kappa = 0.15;
    double rho_c = 0.0;    // m; 0 selects the lattice spacing
    double q_factor = 11.0;
    double loss = 0.25;

    void validate() const;
};

// Isolated-cell response for an effective side.
cplx oracle_reflection(double l_eff, const OracleParams& params);

std::vector<double> effective_sides(const SmallScaleLayout& layout, double dx, double dy, const OracleParams& params);

// Isotropic R converted to psi with T = 0, psi_zz = 0. D must be 1.
std::vector<gstc::SusceptibilityCell> synthetic_oracle(const SmallScaleLayout& layout, const em::PlaneWave& wave,
                                                       double dx, double dy, const OracleParams& params);

struct TrainingRecord {
    SmallScaleLayout layout;
    std::vector<gstc::SusceptibilityCell> targets; // per cell, index p + Pp*q
};

struct TrainingSet {
    int Pp = 5;
    int Qp = 5;
    int D = 1;
    Bounds bounds;
    std::uint64_t seed = 0;
    OracleParams params;
    std::vector<TrainingRecord> records;
};

// n points in [0, 1)^dims, one per stratum along every axis.
std::vector<std::vector<double>> latin_hypercube(int n, int dims, Rng& rng);

TrainingSet build_training_set(const em::PlaneWave& wave, double dx, double dy, int Pp, int Qp, const Bounds& bounds,
                               const OracleParams& params, int B, std::uint64_t seed);

// manifest.json + records.csv
void save_training_set(const TrainingSet& set, const std::filesystem::path& dir);

// 12 real outputs per cell: (e, m) x (xx, yy, zz) x (re, im).
inline constexpr int kOutputs = 12;
std::array<double, kOutputs> flatten(const gstc::SusceptibilityCell& c);
gstc::SusceptibilityCell unflatten(const std::array<double, kOutputs>& y);

// Anything that predicts per-cell susceptibilities of a small-scale window.
class WindowPredictor {
public:
    virtual ~WindowPredictor() = default;
    virtual int Pp() const = 0;
    virtual int Qp() const = 0;
    virtual int D() const = 0;
    // cells: zero-based p' + Pp*q'
    virtual std::vector<gstc::SusceptibilityCell> predict_cells(const SmallScaleLayout& window,
                                                                const std::vector<int>& cells) const = 0;
    std::vector<gstc::SusceptibilityCell> predict(const SmallScaleLayout& window) const;
};

// The oracle itself used as the twin.
class OracleTwin final : public WindowPredictor {
public:
    OracleTwin(const em::PlaneWave& wave, double dx, double dy, int Pp, int Qp, const OracleParams& params);

    int Pp() const override { return pp_; }
    int Qp() const override { return qp_; }
    int D() const override { return 1; }
    std::vector<gstc::SusceptibilityCell> predict_cells(const SmallScaleLayout& window,
                                                        const std::vector<int>& cells) const override;

private:
    em::PlaneWave wave_;
    double dx_;
    double dy_;
    int pp_;
    int qp_;
    OracleParams params_;
};

// per_descriptor: one c per d. self_neighbor: per d, one c for the output
// cell's own descriptor and one shared by the others. full: every n free.
enum class Tying { per_descriptor, self_neighbor, full };

const char* tying_name(Tying t);
Tying tying_from_name(const std::string& s);

struct KrigingConfig {
    Tying tying = Tying::per_descriptor;
    int multistarts = 8;
    int max_steps = 200;
    int tuning_subsample = 128; // 0 tunes on the full set
    double nugget = 1e-10;
    double c_lo = 1e-3;         // c bounds times 1/range
    double c_hi = 1e3;
    std::uint64_t seed = 0;
    std::optional<std::vector<double>> fixed_c; // tied parameters, skips tuning

    void validate() const;
};

struct FitSummary {
    int records = 0;        // after deduplication
    int duplicates = 0;
    double max_interp_error = 0.0; // relative to each output's largest magnitude
    double c_min = 0.0;
    double c_max = 0.0;
    double max_nugget = 0.0;
};

class KrigingModel final : public WindowPredictor {
public:
    static constexpr int kFormatVersion = 1;

    static KrigingModel fit(const TrainingSet& set, const KrigingConfig& cfg);

    int Pp() const override { return pp_; }
    int Qp() const override { return qp_; }
    int D() const override { return d_; }
    std::vector<gstc::SusceptibilityCell> predict_cells(const SmallScaleLayout& window,
                                                        const std::vector<int>& cells) const override;

    // Single scalar output o of cell k.
    double predict_output(const SmallScaleLayout& window, int cell, int output) const;

    const FitSummary& summary() const { return summary_; }
    Tying tying() const { return tying_; }
    const std::vector<double>& c(int cell) const { return cells_[cell].c; }
    double beta(int cell, int output) const { return cells_[cell].beta[output]; }
    const Bounds& bounds() const { return bounds_; }

    // Scenario metadata the model was trained for.
    double frequency = 0.0;
    double dx = 0.0;
    double dy = 0.0;

    nlohmann::json to_json() const;
    static KrigingModel from_json(const nlohmann::json& j);
    void save(const std::filesystem::path& file) const;
    static KrigingModel load(const std::filesystem::path& file);

private:
    struct CellModel {
        std::vector<double> params; // tied, linear scale
        std::vector<double> c;      // expanded to Pp*Qp*D
        double nugget = 0.0;
        std::array<double, kOutputs> beta{};
        std::array<bool, kOutputs> active{};
        std::vector<std::vector<double>> alpha; // per output, empty when inactive
    };

    Eigen::MatrixXd abs_diff(const SmallScaleLayout& window) const;
    double cell_output(const Eigen::VectorXd& r, int cell, int output) const;
    Eigen::VectorXd correlation(const Eigen::MatrixXd& diff, int cell) const;

    int pp_ = 0;
    int qp_ = 0;
    int d_ = 0;
    Tying tying_ = Tying::per_descriptor;
    Bounds bounds_;
    Eigen::MatrixXd x_; // records x inputs
    std::vector<CellModel> cells_;
    FitSummary summary_;
};

// Number of tied parameters and their expansion onto the n index for cell k.
int tied_count(Tying t, int Pp, int Qp, int D);
std::vector<double> expand_params(Tying t, int Pp, int Qp, int D, int cell, const std::vector<double>& params);

} // namespace spss::surrogate
