// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "pipeline.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <limits>
#include <set>
#include <tuple>

#include "error.hpp"
#include "io.hpp"

namespace spss::pipeline {

namespace {

constexpr int kManifestVersion = 1;
constexpr const char* kToolVersion = "1.0.0";

std::string timestamp()
{
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json direction_json(const em::Direction& d)
{
    return {{"theta_deg", rad2deg(d.theta)}, {"phi_deg", rad2deg(d.phi)}, {"u", d.u()}, {"v", d.v()}};
}

nlohmann::json point_json(const em::GroundPoint& g) { return {{"x", g.x}, {"y", g.y}}; }

double level(const Scenario& scn)
{
    return ipt::mask_level(scn.lattice, scn.wave.k0(), ipt::current_polarization(scn.wave), scn.ipt.magnitude,
                           scn.mask_db);
}

radiation::UvGridSpec output_grid(const Scenario& scn)
{
    return radiation::UvGridSpec::nyquist(scn.lattice, scn.wave.wavelength(), scn.output.oversampling);
}

std::vector<double> expand_bounds(const std::vector<double>& per_d, int cells)
{
    std::vector<double> out;
    out.reserve(per_d.size() * static_cast<std::size_t>(cells));
    for (double b : per_d) out.insert(out.end(), static_cast<std::size_t>(cells), b);
    return out;
}

} // namespace

TrainArtifacts train(const Scenario& scn)
{
    TrainArtifacts t{surrogate::build_training_set(scn.wave, scn.lattice.dx, scn.lattice.dy, scn.Pp, scn.Qp,
                                                   scn.bounds, scn.oracle, scn.B, scn.surrogate_seed),
                     {}};
    try {
        t.model = surrogate::KrigingModel::fit(t.set, scn.kriging);
    } catch (const Error& e) {
        if (e.code() == Errc::ill_conditioned) throw Error(Errc::training, e.what());
        throw;
    }
    t.model.frequency = scn.wave.frequency;
    t.model.dx = scn.lattice.dx;
    t.model.dy = scn.lattice.dy;
    return t;
}

void check_model(const Scenario& scn, const surrogate::KrigingModel& model)
{
    auto differs = [](double a, double b) { return std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b)); };
    if (model.Pp() != scn.Pp || model.Qp() != scn.Qp || model.D() != scn.bounds.dims())
        throw Error(Errc::mismatch, "model was trained for a " + std::to_string(model.Pp()) + "x" +
                                        std::to_string(model.Qp()) + "x" + std::to_string(model.D()) +
                                        " small-scale layout, config asks for " + std::to_string(scn.Pp) + "x" +
                                        std::to_string(scn.Qp) + "x" + std::to_string(scn.bounds.dims()));
    if (differs(model.frequency, scn.wave.frequency) || differs(model.dx, scn.lattice.dx) ||
        differs(model.dy, scn.lattice.dy))
        throw Error(Errc::mismatch, "model was trained for a different frequency or lattice spacing");
    for (int d = 0; d < model.D(); ++d)
        if (differs(model.bounds().lo[d], scn.bounds.lo[d]) || differs(model.bounds().hi[d], scn.bounds.hi[d]))
            throw Error(Errc::mismatch, "model descriptor bounds differ from the config");
}

std::shared_ptr<const surrogate::WindowPredictor> make_twin(const Scenario& scn,
                                                            const std::optional<std::filesystem::path>& model)
{
    if (scn.twin == TwinKind::oracle) {
        if (scn.bounds.dims() != 1) throw Error(Errc::config, "config uc.D: the oracle twin models D = 1 only");
        return std::make_shared<surrogate::OracleTwin>(scn.wave, scn.lattice.dx, scn.lattice.dy, scn.Pp, scn.Qp,
                                                       scn.oracle);
    }
    if (!model) throw Error(Errc::mismatch, "a --model file is required for the kriging twin");
    auto m = std::make_shared<surrogate::KrigingModel>(surrogate::KrigingModel::load(*model));
    check_model(scn, *m);
    return m;
}

radiation::CoverageMask ipt_mask(const Scenario& scn)
{
    const double m = level(scn);
    if (scn.objective.kind == Objective::Kind::pencil) return radiation::pencil_mask(scn.objective.target, m);
    const radiation::UvGridSpec grid = radiation::UvGridSpec::nyquist(scn.lattice, scn.wave.wavelength(), 1.0);
    radiation::CoverageMask mask = radiation::shaped_mask(scn.objective.polygons, scn.mount, grid, m);
    if (mask.dirs.empty()) throw Error(Errc::config, "config objective.polygons: no visible direction reaches them");
    return mask;
}

Evaluation evaluate_currents(const Scenario& scn, const gstc::SurfaceCurrentField& currents)
{
    const double k0 = scn.wave.k0();
    radiation::FarFieldSpec spec;
    spec.grid = output_grid(scn);
    spec.strict_nyquist = scn.output.strict_nyquist;
    const bool pencil = scn.objective.kind == Objective::Kind::pencil;
    if (pencil) spec.probes.push_back(scn.objective.target);

    Evaluation e;
    e.currents = currents;
    e.far = radiation::far_field(currents, k0, spec);
    const radiation::FarFieldOperator op(currents, k0);
    PatternMetrics& m = e.metrics;
    m.pencil = pencil;
    m.nyquist_ok = e.far.nyquist_ok;
    m.peak = radiation::peak_direction(e.far, op);
    if (pencil) {
        m.xi_db = radiation::directivity_pencil(e.far, scn.objective.target);
        m.peak_error_deg = rad2deg(em::angular_separation(m.peak, scn.objective.target));
    } else {
        const radiation::CoverageMask mask = radiation::shaped_mask(scn.objective.polygons, scn.mount, spec.grid, 1.0);
        if (mask.dirs.empty()) throw Error(Errc::config, "config objective.polygons: no visible direction reaches them");
        m.xi_db = radiation::directivity_shaped(e.far, mask);
    }
    e.footprint = radiation::footprint(op, scn.mount, scn.output.window, scn.output.spreading);
    m.footprint_peak = e.footprint.peak;
    if (pencil) {
        try {
            m.footprint_target = em::footprint_point(scn.objective.target, scn.mount);
            m.footprint_error_m =
                std::hypot(m.footprint_peak.x - m.footprint_target->x, m.footprint_peak.y - m.footprint_target->y);
        } catch (const Error& err) {
            if (err.code() != Errc::no_ground_intersection) throw;
        }
    }
    return e;
}

ipt::IptResult reference_currents(const Scenario& scn)
{
    return ipt::ipt_run(ipt_mask(scn), scn.lattice, scn.wave, scn.ipt);
}

mapping::LayoutDescriptors lookup_layout(const Scenario& scn, const surrogate::WindowPredictor& twin,
                                         const gstc::SurfaceCurrentField& j_ref, int samples)
{
    if (scn.bounds.dims() != 1) throw Error(Errc::config, "config sbd.init: lookup initialisation needs D = 1");
    const int Pp = twin.Pp(), Qp = twin.Qp();
    const int centre = (Pp - 1) / 2 + Pp * ((Qp - 1) / 2);
    const em::Lattice unit{1, 1, scn.lattice.dx, scn.lattice.dy};
    std::vector<double> sides(samples);
    std::vector<CVec2> table(samples);
    for (int i = 0; i < samples; ++i) {
        sides[i] = scn.bounds.lo[0] + scn.bounds.range(0) * i / (samples - 1);
        surrogate::SmallScaleLayout w(Pp, Qp, 1);
        std::fill(w.g.begin(), w.g.end(), sides[i]);
        gstc::SusceptibilityField f(unit);
        f.cells[0] = twin.predict_cells(w, {centre}).front();
        table[i] = gstc::surface_currents(f, scn.wave).j[0];
    }
    mapping::LayoutDescriptors g(scn.lattice.P, scn.lattice.Q, 1);
    for (int n = 0; n < scn.lattice.size(); ++n) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < samples; ++i) {
            const double d = (table[i] - j_ref.j[n]).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        g.values[n] = sides[best];
    }
    return g;
}

SynthesisReport synthesize(const Scenario& scn, const surrogate::WindowPredictor& twin)
{
    SynthesisReport r;
    r.ipt = reference_currents(scn);

    const sbd::ForwardContext ctx{scn.wave, scn.lattice, &twin};
    const int P = scn.lattice.P, Q = scn.lattice.Q, D = scn.bounds.dims();
    const std::vector<double> lo = expand_bounds(scn.bounds.lo, P * Q);
    const std::vector<double> hi = expand_bounds(scn.bounds.hi, P * Q);
    const gstc::SurfaceCurrentField& j_ref = r.ipt.j_opt;
    const sbd::Cost cost = [&](const std::vector<double>& x) {
        mapping::LayoutDescriptors g(P, Q, D);
        g.values = x;
        return sbd::current_mismatch(g, j_ref, ctx);
    };
    std::vector<std::vector<double>> seeds;
    if (scn.pso_init == PsoInit::lookup) seeds.push_back(lookup_layout(scn, twin, j_ref).values);
    r.pso = sbd::pso_optimize(cost, lo, hi, scn.sbd, seeds);

    r.layout = mapping::LayoutDescriptors(P, Q, D);
    r.layout.values = r.pso.best;
    r.reference = evaluate_currents(scn, j_ref);
    r.achieved = evaluate_currents(scn, sbd::forward_currents(r.layout, ctx));
    return r;
}

Evaluation evaluate_layout(const Scenario& scn, const surrogate::WindowPredictor& twin,
                           const mapping::LayoutDescriptors& g)
{
    if (g.P != scn.lattice.P || g.Q != scn.lattice.Q || g.D != scn.bounds.dims())
        throw Error(Errc::data, "layout is " + std::to_string(g.P) + "x" + std::to_string(g.Q) + "x" +
                                    std::to_string(g.D) + ", config expects " + std::to_string(scn.lattice.P) + "x" +
                                    std::to_string(scn.lattice.Q) + "x" + std::to_string(scn.bounds.dims()));
    g.validate(scn.bounds);
    const sbd::ForwardContext ctx{scn.wave, scn.lattice, &twin};
    return evaluate_currents(scn, sbd::forward_currents(g, ctx));
}

std::string layout_csv(const mapping::LayoutDescriptors& g)
{
    io::CsvWriter csv({"p", "q", "d", "value"});
    for (int d = 0; d < g.D; ++d)
        for (int q = 0; q < g.Q; ++q)
            for (int p = 0; p < g.P; ++p) {
                csv << p + 1 << q + 1 << d + 1 << g.at(p, q, d);
                csv.end_row();
            }
    return csv.str();
}

mapping::LayoutDescriptors read_layout(const std::filesystem::path& file, const Scenario& scn)
{
    const io::CsvTable t = io::read_csv(file);
    if (t.header != std::vector<std::string>{"p", "q", "d", "value"})
        throw Error(Errc::data, file.string() + ": expected header p,q,d,value");
    const int P = scn.lattice.P, Q = scn.lattice.Q, D = scn.bounds.dims();
    mapping::LayoutDescriptors g(P, Q, D);
    std::vector<char> seen(static_cast<std::size_t>(g.size()), 0);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string where = file.filename().string() + " row " + std::to_string(r + 1);
        auto index = [&](double v, int n, const char* name) {
            if (v != std::floor(v) || v < 1 || v > n)
                throw Error(Errc::data, where + ": " + name + " = " + io::fmt(v) + " outside 1.." + std::to_string(n));
            return static_cast<int>(v) - 1;
        };
        const int p = index(row[0], P, "p"), q = index(row[1], Q, "q"), d = index(row[2], D, "d");
        const int i = g.index(p, q, d);
        if (seen[i]) throw Error(Errc::data, where + ": duplicate cell");
        seen[i] = 1;
        g.values[i] = row[3];
    }
    if (static_cast<int>(t.rows.size()) != g.size())
        throw Error(Errc::data, file.string() + ": " + std::to_string(t.rows.size()) + " rows, expected " +
                                    std::to_string(g.size()) + " (layout truncated or mis-sized)");
    return g;
}

std::string currents_csv(const gstc::SurfaceCurrentField& j)
{
    io::CsvWriter csv({"p", "q", "re_jx", "im_jx", "re_jy", "im_jy"});
    for (int q = 0; q < j.lattice.Q; ++q)
        for (int p = 0; p < j.lattice.P; ++p) {
            const CVec2& v = j.at(p, q);
            csv << p + 1 << q + 1 << v.x().real() << v.x().imag() << v.y().real() << v.y().imag();
            csv.end_row();
        }
    return csv.str();
}

std::string farfield_csv(const radiation::FarFieldGrid& far)
{
    double peak = 0.0;
    for (std::size_t s = 0; s < far.n_grid; ++s) peak = std::max(peak, far.samples[s].f.squaredNorm());
    io::CsvWriter csv({"u", "v", "re_fx", "im_fx", "re_fy", "im_fy", "re_fz", "im_fz", "power", "power_db"});
    for (std::size_t s = 0; s < far.n_grid; ++s) {
        const radiation::FarFieldSample& smp = far.samples[s];
        const double pw = smp.f.squaredNorm();
        const double rel = peak > 0.0 ? pw / peak : 0.0;
        csv << smp.u << smp.v;
        for (int k = 0; k < 3; ++k) csv << smp.f(k).real() << smp.f(k).imag();
        csv << pw << (rel > 0.0 ? std::max(10.0 * std::log10(rel), -200.0) : -200.0);
        csv.end_row();
    }
    return csv.str();
}

std::string footprint_csv(const radiation::FootprintMap& map)
{
    io::CsvWriter csv({"x", "y", "power", "power_db"});
    for (int iy = 0; iy < map.window.ny; ++iy)
        for (int ix = 0; ix < map.window.nx; ++ix) {
            const std::size_t i = static_cast<std::size_t>(ix) + static_cast<std::size_t>(map.window.nx) * iy;
            csv << map.window.x_at(ix) << map.window.y_at(iy) << map.power[i] << map.power_db[i];
            csv.end_row();
        }
    return csv.str();
}

std::string trace_csv(const std::string& name, const std::vector<double>& trace)
{
    io::CsvWriter csv({"iteration", name});
    for (std::size_t i = 0; i < trace.size(); ++i) {
        csv << static_cast<long long>(i + 1) << trace[i];
        csv.end_row();
    }
    return csv.str();
}

nlohmann::json metrics_json(const PatternMetrics& m)
{
    nlohmann::json j;
    j["objective"] = m.pencil ? "pencil" : "shaped";
    j[m.pencil ? "xi_pen_db" : "xi_sha_db"] = m.xi_db;
    j["peak_direction"] = direction_json(m.peak);
    if (m.pencil) j["peak_error_deg"] = m.peak_error_deg;
    j["footprint_peak"] = point_json(m.footprint_peak);
    if (m.footprint_target) {
        j["footprint_target"] = point_json(*m.footprint_target);
        j["footprint_error_m"] = m.footprint_error_m;
    }
    j["nyquist_ok"] = m.nyquist_ok;
    return j;
}

void write_artifacts(const std::filesystem::path& dir, const std::string& command, const Scenario& scn,
                     const Artifacts& files)
{
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto& [name, content] : files) {
        io::write_file(dir / name, content);
        hashes[name] = io::hex64(io::fnv1a(content));
    }
    nlohmann::json manifest;
    manifest["format_version"] = kManifestVersion;
    manifest["tool_version"] = kToolVersion;
    manifest["command"] = command;
    manifest["config_hash"] = scn.hash;
    manifest["created"] = timestamp();
    manifest["artifacts"] = std::move(hashes);
    io::write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

void write_training(const std::filesystem::path& dir, const Scenario& scn, const TrainArtifacts& t)
{
    surrogate::save_training_set(t.set, dir / "training_set");
    const surrogate::FitSummary& s = t.model.summary();
    nlohmann::json summary = {{"records", s.records},
                              {"duplicates_merged", s.duplicates},
                              {"max_interp_error", s.max_interp_error},
                              {"c_min", s.c_min},
                              {"c_max", s.c_max},
                              {"max_nugget", s.max_nugget},
                              {"tying", surrogate::tying_name(t.model.tying())}};
    Artifacts files;
    files["model.json"] = t.model.to_json().dump() + "\n";
    files["training_summary.json"] = summary.dump(2) + "\n";
    files["training_set/manifest.json"] = io::read_file(dir / "training_set" / "manifest.json");
    files["training_set/records.csv"] = io::read_file(dir / "training_set" / "records.csv");
    write_artifacts(dir, "train", scn, files);
}

Artifacts report_artifacts(const Scenario& scn, const SynthesisReport& r)
{
    nlohmann::json rep;
    rep["config_hash"] = scn.hash;
    rep["scenario"] = scn.document;
    rep["reference"] = metrics_json(r.reference.metrics);
    rep["achieved"] = metrics_json(r.achieved.metrics);
    rep["ipt"] = {{"iterations", r.ipt.iterations_run},
                  {"termination", r.ipt.termination == ipt::Termination::converged ? "converged" : "max_iterations"},
                  {"gamma_first", r.ipt.gamma_history.front()},
                  {"gamma_final", r.ipt.gamma_history.back()}};
    rep["sbd"] = {{"evaluations", r.pso.evaluations},
                  {"iterations", r.pso.history.size()},
                  {"delta_initial", r.pso.history.front()},
                  {"delta_final", r.pso.best_value}};

    Artifacts files;
    files["report.json"] = rep.dump(2) + "\n";
    files["layout.csv"] = layout_csv(r.layout);
    files["currents_ref.csv"] = currents_csv(r.ipt.j_opt);
    files["currents_achieved.csv"] = currents_csv(r.achieved.currents);
    files["farfield.csv"] = farfield_csv(r.achieved.far);
    files["footprint.csv"] = footprint_csv(r.achieved.footprint);
    files["delta_trace.csv"] = trace_csv("delta_best", r.pso.history);
    files["gamma_trace.csv"] = trace_csv("gamma", r.ipt.gamma_history);
    return files;
}

Artifacts evaluation_artifacts(const Scenario& scn, const Evaluation& e)
{
    nlohmann::json j = metrics_json(e.metrics);
    j["config_hash"] = scn.hash;
    Artifacts files;
    files["metrics.json"] = j.dump(2) + "\n";
    files["currents.csv"] = currents_csv(e.currents);
    files["farfield.csv"] = farfield_csv(e.far);
    files["footprint.csv"] = footprint_csv(e.footprint);
    return files;
}

nlohmann::json verify_manifest(const std::filesystem::path& dir)
{
    const std::filesystem::path file = dir / "manifest.json";
    if (!std::filesystem::exists(file)) throw Error(Errc::data, "no manifest.json in " + dir.string());
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(io::read_file(file));
        for (const auto& [name, hash] : m.at("artifacts").items()) {
            const std::filesystem::path f = dir / name;
            if (!std::filesystem::exists(f)) throw Error(Errc::data, "artifact missing: " + f.string());
            if (io::hex64(io::fnv1a(io::read_file(f))) != hash.get<std::string>())
                throw Error(Errc::data, "artifact " + name + " does not match its manifest hash");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::data, "malformed manifest " + file.string() + ": " + e.what());
    }
    return m;
}

} // namespace spss::pipeline
