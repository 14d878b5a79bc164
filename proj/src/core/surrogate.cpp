// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"
#include "io.hpp"

namespace spss::surrogate {

void Bounds::validate() const
{
    if (lo.empty() || lo.size() != hi.size()) throw Error(Errc::config, "descriptor bounds need matching lo/hi lists");
    for (std::size_t d = 0; d < lo.size(); ++d)
        if (!(std::isfinite(lo[d]) && std::isfinite(hi[d]) && hi[d] > lo[d]))
            throw Error(Errc::config, "descriptor bounds must satisfy lo < hi");
}

void SmallScaleLayout::validate(const Bounds& b) const
{
    if (Pp < 1 || Qp < 1 || D < 1 || static_cast<int>(g.size()) != size())
        throw Error(Errc::invalid_argument, "small-scale layout has inconsistent shape");
    if (b.dims() != D) throw Error(Errc::invalid_argument, "layout and bounds disagree on D");
    for (int d = 0; d < D; ++d)
        for (int i = 0; i < cells(); ++i) {
            const double x = g[static_cast<std::size_t>(i) + static_cast<std::size_t>(cells()) * d];
            if (!(x >= b.lo[d] && x <= b.hi[d])) throw Error(Errc::invalid_argument, "descriptor outside its bounds");
        }
}

void OracleParams::validate() const
{
    if (!(l_res > 0.0)) throw Error(Errc::config, "uc.oracle.l_res must be positive");
    if (!(kappa >= 0.0)) throw Error(Errc::config, "uc.oracle.kappa must be non-negative");
    if (!(rho_c >= 0.0)) throw Error(Errc::config, "uc.oracle.rho_c must be non-negative");
    if (!(q_factor > 0.0)) throw Error(Errc::config, "uc.oracle.q_factor must be positive");
    if (!(loss >= 0.0 && loss < 1.0)) throw Error(Errc::config, "uc.oracle.loss must lie in [0, 1)");
}

cplx oracle_reflection(double l_eff, const OracleParams& params)
{
    const double x = params.q_factor * (l_eff - params.l_res) / params.l_res;
    const double phase = 2.0 * std::atan2(params.q_factor * (params.l_res - l_eff), params.l_res);
    const double mag = 1.0 - params.loss / (1.0 + x * x);
    return std::polar(mag, phase);
}

std::vector<double> effective_sides(const SmallScaleLayout& layout, double dx, double dy, const OracleParams& params)
{
    if (layout.D != 1) throw Error(Errc::invalid_argument, "the synthetic oracle models a single side descriptor");
    const double rho = params.rho_c > 0.0 ? params.rho_c : dx;
    std::vector<double> out(layout.cells());
    for (int q = 0; q < layout.Qp; ++q) {
        for (int p = 0; p < layout.Pp; ++p) {
            const double l = layout.at(p, q, 0);
            double acc = 0.0;
            for (int q2 = 0; q2 < layout.Qp; ++q2) {
                for (int p2 = 0; p2 < layout.Pp; ++p2) {
                    if (p2 == p && q2 == q) continue;
                    const double dist = std::hypot((p2 - p) * dx, (q2 - q) * dy);
                    acc += std::exp(-dist / rho) * (layout.at(p2, q2, 0) - l);
                }
            }
            out[layout.index(p, q, 0)] = l + params.kappa * acc;
        }
    }
    return out;
}

namespace {

gstc::SusceptibilityCell oracle_cell(double l_eff, const em::PlaneWave& wave, const OracleParams& params)
{
    gstc::ReflectionTensor r;
    r.te_te = oracle_reflection(l_eff, params);
    r.tm_tm = r.te_te;
    return gstc::susceptibility_from_reflection(r, gstc::Transmission{}, wave);
}

} // namespace

std::vector<gstc::SusceptibilityCell> synthetic_oracle(const SmallScaleLayout& layout, const em::PlaneWave& wave,
                                                       double dx, double dy, const OracleParams& params)
{
    const std::vector<double> l_eff = effective_sides(layout, dx, dy, params);
    std::vector<gstc::SusceptibilityCell> out(l_eff.size());
    for (std::size_t i = 0; i < l_eff.size(); ++i) out[i] = oracle_cell(l_eff[i], wave, params);
    return out;
}

std::vector<std::vector<double>> latin_hypercube(int n, int dims, Rng& rng)
{
    if (n < 1 || dims < 1) throw Error(Errc::invalid_argument, "latin hypercube needs n, dims >= 1");
    std::vector<std::vector<double>> pts(n, std::vector<double>(dims));
    std::vector<int> perm(n);
    for (int d = 0; d < dims; ++d) {
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[uniform_index(rng, static_cast<std::uint64_t>(i) + 1)]);
        for (int i = 0; i < n; ++i) pts[i][d] = (perm[i] + uniform01(rng)) / n;
    }
    return pts;
}

TrainingSet build_training_set(const em::PlaneWave& wave, double dx, double dy, int Pp, int Qp, const Bounds& bounds,
                               const OracleParams& params, int B, std::uint64_t seed)
{
    bounds.validate();
    params.validate();
    if (B < 2) throw Error(Errc::config, "training set needs B >= 2");
    if (Pp < 1 || Qp < 1 || Pp % 2 == 0 || Qp % 2 == 0) throw Error(Errc::config, "small-scale size must be odd");
    TrainingSet set;
    set.Pp = Pp;
    set.Qp = Qp;
    set.D = bounds.dims();
    set.bounds = bounds;
    set.seed = seed;
    set.params = params;

    Rng rng(seed);
    const int dims = Pp * Qp * set.D;
    const auto pts = latin_hypercube(B, dims, rng);
    set.records.resize(B);
    for (int b = 0; b < B; ++b) {
        SmallScaleLayout l(Pp, Qp, set.D);
        for (int n = 0; n < dims; ++n) {
            const int d = n / (Pp * Qp);
            l.g[n] = bounds.lo[d] + bounds.range(d) * pts[b][n];
        }
        set.records[b].targets = synthetic_oracle(l, wave, dx, dy, params);
        set.records[b].layout = std::move(l);
    }
    return set;
}

std::array<double, kOutputs> flatten(const gstc::SusceptibilityCell& c)
{
    std::array<double, kOutputs> y{};
    for (int k = 0; k < 3; ++k) {
        y[2 * k] = c.psi_e(k).real();
        y[2 * k + 1] = c.psi_e(k).imag();
        y[6 + 2 * k] = c.psi_m(k).real();
        y[6 + 2 * k + 1] = c.psi_m(k).imag();
    }
    return y;
}

gstc::SusceptibilityCell unflatten(const std::array<double, kOutputs>& y)
{
    gstc::SusceptibilityCell c;
    for (int k = 0; k < 3; ++k) {
        c.psi_e(k) = cplx(y[2 * k], y[2 * k + 1]);
        c.psi_m(k) = cplx(y[6 + 2 * k], y[6 + 2 * k + 1]);
    }
    return c;
}

void save_training_set(const TrainingSet& set, const std::filesystem::path& dir)
{
    nlohmann::json m;
    m["format"] = "spss-training-set";
    m["format_version"] = 1;
    m["Pp"] = set.Pp;
    m["Qp"] = set.Qp;
    m["D"] = set.D;
    m["B"] = set.records.size();
    m["bounds"] = {{"lo", set.bounds.lo}, {"hi", set.bounds.hi}};
    m["seed"] = set.seed;
    m["oracle"] = {{"l_res", set.params.l_res},   {"kappa", set.params.kappa}, {"rho_c", set.params.rho_c},
                   {"q_factor", set.params.q_factor}, {"loss", set.params.loss}};
    io::write_file(dir / "manifest.json", m.dump(2) + "\n");

    std::vector<std::string> header{"b", "p", "q"};
    for (int d = 1; d <= set.D; ++d) header.push_back("g" + std::to_string(d));
    for (const char* kind : {"e", "m"})
        for (const char* comp : {"xx", "yy", "zz"})
            for (const char* part : {"re", "im"})
                header.push_back(std::string(part) + "_psi_" + kind + "_" + comp);
    io::CsvWriter csv(header);
    for (std::size_t b = 0; b < set.records.size(); ++b) {
        const TrainingRecord& r = set.records[b];
        for (int q = 0; q < set.Qp; ++q) {
            for (int p = 0; p < set.Pp; ++p) {
                csv << static_cast<int>(b + 1) << p + 1 << q + 1;
                for (int d = 0; d < set.D; ++d) csv << r.layout.at(p, q, d);
                for (double y : flatten(r.targets[r.layout.index(p, q, 0)])) csv << y;
                csv.end_row();
            }
        }
    }
    io::write_file(dir / "records.csv", csv.str());
}

std::vector<gstc::SusceptibilityCell> WindowPredictor::predict(const SmallScaleLayout& window) const
{
    std::vector<int> all(window.cells());
    std::iota(all.begin(), all.end(), 0);
    return predict_cells(window, all);
}

OracleTwin::OracleTwin(const em::PlaneWave& wave, double dx, double dy, int Pp, int Qp, const OracleParams& params)
    : wave_(wave), dx_(dx), dy_(dy), pp_(Pp), qp_(Qp), params_(params)
{
    params_.validate();
}

std::vector<gstc::SusceptibilityCell> OracleTwin::predict_cells(const SmallScaleLayout& window,
                                                                const std::vector<int>& cells) const
{
    if (window.Pp != pp_ || window.Qp != qp_ || window.D != 1)
        throw Error(Errc::invalid_argument, "window shape does not match the twin");
    const std::vector<double> l_eff = effective_sides(window, dx_, dy_, params_);
    std::vector<gstc::SusceptibilityCell> out;
    out.reserve(cells.size());
    for (int k : cells) out.push_back(oracle_cell(l_eff.at(k), wave_, params_));
    return out;
}

const char* tying_name(Tying t)
{
    switch (t) {
    case Tying::per_descriptor: return "per_descriptor";
    case Tying::self_neighbor: return "self_neighbor";
    case Tying::full: return "full";
    }
    return "?";
}

Tying tying_from_name(const std::string& s)
{
    if (s == "per_descriptor") return Tying::per_descriptor;
    if (s == "self_neighbor") return Tying::self_neighbor;
    if (s == "full") return Tying::full;
    throw Error(Errc::config, "unknown tying '" + s + "'");
}

void KrigingConfig::validate() const
{
    if (multistarts < 1) throw Error(Errc::config, "surrogate.tuning.multistarts must be at least 1");
    if (max_steps < 0) throw Error(Errc::config, "surrogate.tuning.max_steps must be non-negative");
    if (tuning_subsample < 0 || tuning_subsample == 1) throw Error(Errc::config, "surrogate.tuning.subsample must be 0 or >= 2");
    if (!(nugget > 0.0 && nugget <= 1e-6)) throw Error(Errc::config, "surrogate.tuning.nugget must lie in (0, 1e-6]");
    if (!(c_lo > 0.0 && c_hi > c_lo)) throw Error(Errc::config, "surrogate c bounds must satisfy 0 < lo < hi");
    if (fixed_c)
        for (double c : *fixed_c)
            if (!(c > 0.0)) throw Error(Errc::config, "fixed c values must be positive");
}

int tied_count(Tying t, int Pp, int Qp, int D)
{
    switch (t) {
    case Tying::per_descriptor: return D;
    case Tying::self_neighbor: return Pp * Qp > 1 ? 2 * D : D;
    case Tying::full: return Pp * Qp * D;
    }
    return D;
}

// tied parameter owning input n for output cell k
static int tied_slot(Tying t, int cells, int cell, int n)
{
    const int d = n / cells;
    switch (t) {
    case Tying::per_descriptor: return d;
    case Tying::self_neighbor: return cells > 1 ? 2 * d + (n % cells == cell ? 0 : 1) : d;
    case Tying::full: return n;
    }
    return d;
}

std::vector<double> expand_params(Tying t, int Pp, int Qp, int D, int cell, const std::vector<double>& params)
{
    const int cells = Pp * Qp;
    std::vector<double> c(static_cast<std::size_t>(cells) * D);
    for (int n = 0; n < cells * D; ++n) c[n] = params.at(tied_slot(t, cells, cell, n));
    return c;
}

namespace {

struct Factor {
    Eigen::LLT<Eigen::MatrixXd> llt;
    double nugget = 0.0;
};

// R + nugget I, escalating by decades up to 1e-6.
bool factorize(const Eigen::MatrixXd& r, double nugget, Factor& f)
{
    for (double nu = nugget; nu <= 1e-6 * (1.0 + 1e-9); nu *= 10.0) {
        Eigen::MatrixXd a = r;
        a.diagonal().array() += nu;
        f.llt.compute(a);
        if (f.llt.info() == Eigen::Success && (f.llt.matrixLLT().diagonal().array() > 0.0).all()) {
            f.nugget = nu;
            return true;
        }
    }
    return false;
}

class Tuner {
public:
    Tuner(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const std::vector<int>& active, Tying tying, int Pp,
          int Qp, int D, int cell, const Bounds& bounds, const KrigingConfig& cfg)
        : y_(y), active_(active), cfg_(cfg)
    {
        const int n = static_cast<int>(x.rows());
        const int cells = Pp * Qp;
        const int t_count = tied_count(tying, Pp, Qp, D);
        dist_.assign(t_count, Eigen::MatrixXd::Zero(n, n));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                for (int k = 0; k < x.cols(); ++k) {
                    const int t = tied_slot(tying, cells, cell, k);
                    const double a = std::abs(x(i, k) - x(j, k));
                    dist_[t](i, j) += a;
                }
        for (auto& m : dist_) m.triangularView<Eigen::StrictlyLower>() = m.transpose();
        lo_.resize(t_count);
        hi_.resize(t_count);
        for (int t = 0; t < t_count; ++t) {
            int d = 0;
            switch (tying) {
            case Tying::per_descriptor: d = t; break;
            case Tying::self_neighbor: d = cells > 1 ? t / 2 : t; break;
            case Tying::full: d = t / cells; break;
            }
            lo_[t] = std::log10(cfg.c_lo / bounds.range(d));
            hi_[t] = std::log10(cfg.c_hi / bounds.range(d));
        }
    }

    // concentrated log-likelihood at log10 parameters z
    double loglik(const std::vector<double>& z) const
    {
        const int n = static_cast<int>(y_.rows());
        Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t t = 0; t < z.size(); ++t) r.noalias() -= std::pow(10.0, z[t]) * dist_[t];
        r = r.array().exp().matrix();
        Factor f;
        if (!factorize(r, cfg_.nugget, f)) return -std::numeric_limits<double>::infinity();
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
        const Eigen::VectorXd r1 = f.llt.solve(ones);
        const double denom = ones.dot(r1);
        double logdet = 0.0;
        for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(f.llt.matrixLLT()(i, i));
        double ll = 0.0;
        for (int o : active_) {
            const Eigen::VectorXd y = y_.col(o);
            const Eigen::VectorXd ry = f.llt.solve(y);
            const double beta = r1.dot(y) / denom;
            const Eigen::VectorXd res = y - beta * ones;
            const double s2 = std::max(res.dot(ry - beta * r1) / n, 1e-300);
            ll -= 0.5 * n * std::log(s2) + 0.5 * logdet;
        }
        return ll;
    }

    std::vector<double> search(Rng& rng) const
    {
        const int t_count = static_cast<int>(lo_.size());
        std::vector<std::vector<double>> starts;
        std::vector<double> centre(t_count);
        for (int t = 0; t < t_count; ++t) centre[t] = 0.5 * (lo_[t] + hi_[t]);
        starts.push_back(centre);
        if (cfg_.multistarts > 1) {
            const auto pts = latin_hypercube(cfg_.multistarts - 1, t_count, rng);
            for (const auto& u : pts) {
                std::vector<double> z(t_count);
                for (int t = 0; t < t_count; ++t) z[t] = lo_[t] + (hi_[t] - lo_[t]) * u[t];
                starts.push_back(z);
            }
        }
        std::vector<double> best_z = centre;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& z0 : starts) {
            std::vector<double> z = z0;
            double f = loglik(z);
            double step = 0.25 * (hi_[0] - lo_[0]);
            for (int s = 0; s < cfg_.max_steps && step >= 1e-3; ++s) {
                std::vector<double> cand_best;
                double f_cand = f;
                for (int t = 0; t < t_count; ++t) {
                    for (double sign : {1.0, -1.0}) {
                        std::vector<double> c = z;
                        c[t] = std::clamp(c[t] + sign * step, lo_[t], hi_[t]);
                        if (c[t] == z[t]) continue;
                        const double fc = loglik(c);
                        if (fc > f_cand) {
                            f_cand = fc;
                            cand_best = c;
                        }
                    }
                }
                if (cand_best.empty()) {
                    step *= 0.5;
                } else {
                    z = cand_best;
                    f = f_cand;
                }
            }
            if (f > best) {
                best = f;
                best_z = z;
            }
        }
        std::vector<double> c(t_count);
        for (int t = 0; t < t_count; ++t) c[t] = std::pow(10.0, best_z[t]);
        return c;
    }

private:
    const Eigen::MatrixXd& y_;
    const std::vector<int>& active_;
    const KrigingConfig& cfg_;
    std::vector<Eigen::MatrixXd> dist_;
    std::vector<double> lo_;
    std::vector<double> hi_;
};

} // namespace

KrigingModel KrigingModel::fit(const TrainingSet& set, const KrigingConfig& cfg)
{
    cfg.validate();
    set.bounds.validate();
    if (set.records.size() < 2) throw Error(Errc::training, "training set needs at least two records");
    const int cells = set.Pp * set.Qp;
    const int dims = cells * set.D;
    const int t_count = tied_count(cfg.tying, set.Pp, set.Qp, set.D);
    if (cfg.fixed_c && static_cast<int>(cfg.fixed_c->size()) != t_count)
        throw Error(Errc::config, "fixed c needs " + std::to_string(t_count) + " values for this tying");

    // sort by input, merge duplicates
    std::vector<std::size_t> order(set.records.size());
    std::iota(order.begin(), order.end(), 0);
    for (const TrainingRecord& r : set.records) {
        if (r.layout.Pp != set.Pp || r.layout.Qp != set.Qp || r.layout.D != set.D ||
            static_cast<int>(r.layout.g.size()) != dims || static_cast<int>(r.targets.size()) != cells)
            throw Error(Errc::training, "training record shape does not match the set");
        for (double v : r.layout.g)
            if (!std::isfinite(v)) throw Error(Errc::training, "non-finite descriptor in training set");
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return set.records[a].layout.g < set.records[b].layout.g;
    });
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i : order) {
        if (!groups.empty() && set.records[groups.back().front()].layout.g == set.records[i].layout.g)
            groups.back().push_back(i);
        else
            groups.push_back({i});
    }

    KrigingModel m;
    m.pp_ = set.Pp;
    m.qp_ = set.Qp;
    m.d_ = set.D;
    m.tying_ = cfg.tying;
    m.bounds_ = set.bounds;
    const int B = static_cast<int>(groups.size());
    m.summary_.records = B;
    m.summary_.duplicates = static_cast<int>(set.records.size()) - B;
    if (B < 2) throw Error(Errc::training, "training set has fewer than two distinct inputs");
    m.x_.resize(B, dims);
    for (int b = 0; b < B; ++b)
        for (int n = 0; n < dims; ++n) m.x_(b, n) = set.records[groups[b].front()].layout.g[n];

    // strided subsample of the sorted set for tuning
    std::vector<int> sub;
    if (cfg.tuning_subsample == 0 || cfg.tuning_subsample >= B) {
        sub.resize(B);
        std::iota(sub.begin(), sub.end(), 0);
    } else {
        for (int i = 0; i < cfg.tuning_subsample; ++i)
            sub.push_back(static_cast<int>(static_cast<long long>(i) * B / cfg.tuning_subsample));
    }
    Eigen::MatrixXd x_sub(static_cast<Eigen::Index>(sub.size()), dims);
    for (std::size_t i = 0; i < sub.size(); ++i) x_sub.row(static_cast<Eigen::Index>(i)) = m.x_.row(sub[i]);

    m.summary_.c_min = std::numeric_limits<double>::infinity();
    m.summary_.c_max = 0.0;
    m.cells_.resize(cells);
    for (int k = 0; k < cells; ++k) {
        Eigen::MatrixXd y(B, kOutputs);
        for (int b = 0; b < B; ++b) {
            std::array<double, kOutputs> acc{};
            for (std::size_t i : groups[b]) {
                const auto v = flatten(set.records[i].targets[k]);
                for (int o = 0; o < kOutputs; ++o) acc[o] += v[o];
            }
            for (int o = 0; o < kOutputs; ++o) {
                y(b, o) = acc[o] / static_cast<double>(groups[b].size());
                if (!std::isfinite(y(b, o))) throw Error(Errc::training, "non-finite target in training set");
            }
        }

        CellModel& cm = m.cells_[k];
        std::vector<int> active;
        for (int o = 0; o < kOutputs; ++o) {
            const double lo = y.col(o).minCoeff();
            const double hi = y.col(o).maxCoeff();
            const double scale = y.col(o).cwiseAbs().maxCoeff();
            cm.active[o] = (hi - lo) > 1e-12 * scale;
            if (cm.active[o]) active.push_back(o);
            else cm.beta[o] = y(0, o);
        }

        if (cfg.fixed_c) {
            cm.params = *cfg.fixed_c;
        } else if (active.empty()) {
            cm.params.resize(t_count);
            for (int t = 0; t < t_count; ++t) cm.params[t] = 1.0 / set.bounds.range(0);
        } else {
            Eigen::MatrixXd y_sub(static_cast<Eigen::Index>(sub.size()), kOutputs);
            for (std::size_t i = 0; i < sub.size(); ++i) y_sub.row(static_cast<Eigen::Index>(i)) = y.row(sub[i]);
            const Tuner tuner(x_sub, y_sub, active, cfg.tying, set.Pp, set.Qp, set.D, k, set.bounds, cfg);
            Rng rng(cfg.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1)));
            cm.params = tuner.search(rng);
        }
        cm.c = expand_params(cfg.tying, set.Pp, set.Qp, set.D, k, cm.params);
        for (double c : cm.params) {
            m.summary_.c_min = std::min(m.summary_.c_min, c);
            m.summary_.c_max = std::max(m.summary_.c_max, c);
        }

        cm.alpha.assign(kOutputs, {});
        if (active.empty()) continue;

        const Eigen::Map<const Eigen::VectorXd> c(cm.c.data(), dims);
        Eigen::MatrixXd r(B, B);
        for (int i = 0; i < B; ++i) {
            r(i, i) = 1.0;
            for (int j = i + 1; j < B; ++j) {
                const double s = ((m.x_.row(i) - m.x_.row(j)).cwiseAbs() * c)(0);
                r(i, j) = r(j, i) = std::exp(-s);
            }
        }
        Factor f;
        if (!factorize(r, cfg.nugget, f))
            throw Error(Errc::ill_conditioned, "correlation matrix of cell " + std::to_string(k) +
                                                   " is not positive definite even with nugget 1e-6");
        cm.nugget = f.nugget;
        m.summary_.max_nugget = std::max(m.summary_.max_nugget, f.nugget);
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(B);
        const Eigen::VectorXd r1 = f.llt.solve(ones);
        for (int o : active) {
            const Eigen::VectorXd yo = y.col(o);
            const Eigen::VectorXd ry = f.llt.solve(yo);
            cm.beta[o] = r1.dot(yo) / ones.dot(r1);
            const Eigen::VectorXd a = ry - cm.beta[o] * r1;
            cm.alpha[o].assign(a.data(), a.data() + B);
            const Eigen::VectorXd pred = cm.beta[o] * ones + r * a;
            const double scale = yo.cwiseAbs().maxCoeff();
            m.summary_.max_interp_error = std::max(m.summary_.max_interp_error, (pred - yo).cwiseAbs().maxCoeff() / scale);
        }
    }
    return m;
}

Eigen::MatrixXd KrigingModel::abs_diff(const SmallScaleLayout& window) const
{
    if (window.Pp != pp_ || window.Qp != qp_ || window.D != d_ || window.size() != x_.cols())
        throw Error(Errc::mismatch, "window shape does not match the surrogate");
    const Eigen::Map<const Eigen::RowVectorXd> w(window.g.data(), window.size());
    return (x_.rowwise() - w).cwiseAbs();
}

Eigen::VectorXd KrigingModel::correlation(const Eigen::MatrixXd& diff, int cell) const
{
    const CellModel& cm = cells_[cell];
    const Eigen::Map<const Eigen::VectorXd> c(cm.c.data(), static_cast<Eigen::Index>(cm.c.size()));
    return (-(diff * c)).array().exp().matrix();
}

double KrigingModel::cell_output(const Eigen::VectorXd& r, int cell, int output) const
{
    const CellModel& cm = cells_[cell];
    if (!cm.active[output]) return cm.beta[output];
    const Eigen::Map<const Eigen::VectorXd> a(cm.alpha[output].data(), r.size());
    return cm.beta[output] + r.dot(a);
}

double KrigingModel::predict_output(const SmallScaleLayout& window, int cell, int output) const
{
    if (cell < 0 || cell >= pp_ * qp_ || output < 0 || output >= kOutputs)
        throw Error(Errc::invalid_argument, "output index out of range");
    return cell_output(correlation(abs_diff(window), cell), cell, output);
}

std::vector<gstc::SusceptibilityCell> KrigingModel::predict_cells(const SmallScaleLayout& window,
                                                                  const std::vector<int>& cells) const
{
    const Eigen::MatrixXd diff = abs_diff(window);
    std::vector<gstc::SusceptibilityCell> out;
    out.reserve(cells.size());
    for (int k : cells) {
        if (k < 0 || k >= pp_ * qp_) throw Error(Errc::invalid_argument, "cell index out of range");
        const Eigen::VectorXd r = correlation(diff, k);
        std::array<double, kOutputs> y{};
        for (int o = 0; o < kOutputs; ++o) y[o] = cell_output(r, k, o);
        out.push_back(unflatten(y));
    }
    return out;
}

nlohmann::json KrigingModel::to_json() const
{
    nlohmann::json j;
    j["format"] = "spss-kriging";
    j["format_version"] = kFormatVersion;
    j["Pp"] = pp_;
    j["Qp"] = qp_;
    j["D"] = d_;
    j["tying"] = tying_name(tying_);
    j["bounds"] = {{"lo", bounds_.lo}, {"hi", bounds_.hi}};
    j["scenario"] = {{"frequency", frequency}, {"dx", dx}, {"dy", dy}};
    nlohmann::json inputs = nlohmann::json::array();
    for (Eigen::Index b = 0; b < x_.rows(); ++b) {
        std::vector<double> row(x_.cols());
        for (Eigen::Index n = 0; n < x_.cols(); ++n) row[n] = x_(b, n);
        inputs.push_back(row);
    }
    j["inputs"] = std::move(inputs);
    nlohmann::json cells = nlohmann::json::array();
    for (const CellModel& cm : cells_) {
        nlohmann::json c;
        c["params"] = cm.params;
        c["nugget"] = cm.nugget;
        nlohmann::json outs = nlohmann::json::array();
        for (int o = 0; o < kOutputs; ++o) {
            nlohmann::json out;
            out["beta"] = cm.beta[o];
            if (cm.active[o]) out["alpha"] = cm.alpha[o];
            outs.push_back(std::move(out));
        }
        c["outputs"] = std::move(outs);
        cells.push_back(std::move(c));
    }
    j["cells"] = std::move(cells);
    j["summary"] = {{"records", summary_.records},
                    {"duplicates", summary_.duplicates},
                    {"max_interp_error", summary_.max_interp_error},
                    {"c_min", summary_.c_min},
                    {"c_max", summary_.c_max},
                    {"max_nugget", summary_.max_nugget}};
    return j;
}

KrigingModel KrigingModel::from_json(const nlohmann::json& j)
{
    try {
        if (j.at("format").get<std::string>() != "spss-kriging")
            throw Error(Errc::data, "not a surrogate model file");
        if (j.at("format_version").get<int>() != kFormatVersion)
            throw Error(Errc::mismatch, "unsupported model format version");
        KrigingModel m;
        m.pp_ = j.at("Pp").get<int>();
        m.qp_ = j.at("Qp").get<int>();
        m.d_ = j.at("D").get<int>();
        m.tying_ = tying_from_name(j.at("tying").get<std::string>());
        m.bounds_.lo = j.at("bounds").at("lo").get<std::vector<double>>();
        m.bounds_.hi = j.at("bounds").at("hi").get<std::vector<double>>();
        m.frequency = j.at("scenario").at("frequency").get<double>();
        m.dx = j.at("scenario").at("dx").get<double>();
        m.dy = j.at("scenario").at("dy").get<double>();
        const int dims = m.pp_ * m.qp_ * m.d_;
        const auto& inputs = j.at("inputs");
        const int B = static_cast<int>(inputs.size());
        if (dims < 1 || B < 2) throw Error(Errc::data, "model has an empty input set");
        m.x_.resize(B, dims);
        for (int b = 0; b < B; ++b) {
            const auto row = inputs.at(b).get<std::vector<double>>();
            if (static_cast<int>(row.size()) != dims) throw Error(Errc::data, "model input row has the wrong length");
            for (int n = 0; n < dims; ++n) m.x_(b, n) = row[n];
        }
        const auto& cells = j.at("cells");
        if (static_cast<int>(cells.size()) != m.pp_ * m.qp_) throw Error(Errc::data, "model cell count mismatch");
        m.cells_.resize(cells.size());
        for (std::size_t k = 0; k < cells.size(); ++k) {
            CellModel& cm = m.cells_[k];
            cm.params = cells[k].at("params").get<std::vector<double>>();
            if (static_cast<int>(cm.params.size()) != tied_count(m.tying_, m.pp_, m.qp_, m.d_))
                throw Error(Errc::data, "model hyperparameter count mismatch");
            cm.c = expand_params(m.tying_, m.pp_, m.qp_, m.d_, static_cast<int>(k), cm.params);
            cm.nugget = cells[k].at("nugget").get<double>();
            const auto& outs = cells[k].at("outputs");
            if (outs.size() != kOutputs) throw Error(Errc::data, "model output count mismatch");
            cm.alpha.assign(kOutputs, {});
            for (int o = 0; o < kOutputs; ++o) {
                cm.beta[o] = outs[o].at("beta").get<double>();
                cm.active[o] = outs[o].contains("alpha");
                if (cm.active[o]) {
                    cm.alpha[o] = outs[o].at("alpha").get<std::vector<double>>();
                    if (static_cast<int>(cm.alpha[o].size()) != B) throw Error(Errc::data, "model weight length mismatch");
                }
            }
        }
        const auto& s = j.at("summary");
        m.summary_.records = s.at("records").get<int>();
        m.summary_.duplicates = s.at("duplicates").get<int>();
        m.summary_.max_interp_error = s.at("max_interp_error").get<double>();
        m.summary_.c_min = s.at("c_min").get<double>();
        m.summary_.c_max = s.at("c_max").get<double>();
        m.summary_.max_nugget = s.at("max_nugget").get<double>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::data, std::string("malformed model file: ") + e.what());
    }
}

void KrigingModel::save(const std::filesystem::path& file) const
{
    io::write_file(file, to_json().dump() + "\n");
}

KrigingModel KrigingModel::load(const std::filesystem::path& file)
{
    if (!std::filesystem::exists(file)) throw Error(Errc::mismatch, "model file not found: " + file.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(io::read_file(file));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::data, "model file " + file.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j);
}

} // namespace spss::surrogate
