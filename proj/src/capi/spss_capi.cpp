// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "spss.h"

#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <memory>
#include <new>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "error.hpp"
#include "io.hpp"
#include "pipeline.hpp"

struct spss_scenario {
    spss::Scenario scn;
};

struct spss_model {
    std::shared_ptr<const spss::surrogate::WindowPredictor> twin;
};

namespace {

thread_local std::string g_last_error;

spss_status fail(spss_status s, const std::string& msg)
{
    g_last_error = msg;
    return s;
}

template <class F>
spss_status guarded(F&& f)
{
    try {
        f();
        g_last_error.clear();
        return SPSS_OK;
    } catch (const spss::Error& e) {
        return fail(static_cast<spss_status>(spss::status_of(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SPSS_ERR_INTERNAL, "out of memory");
    } catch (const std::filesystem::filesystem_error& e) {
        return fail(SPSS_ERR_INTERNAL, e.what());
    } catch (const std::exception& e) {
        return fail(SPSS_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SPSS_ERR_INTERNAL, "unknown failure");
    }
}

void fill(spss_summary* s, const spss::pipeline::PatternMetrics& m)
{
    if (!s) return;
    s->pencil = m.pencil ? 1 : 0;
    s->xi_db = m.xi_db;
    s->peak_theta_deg = spss::rad2deg(m.peak.theta);
    s->peak_phi_deg = spss::rad2deg(m.peak.phi);
    s->peak_error_deg = m.pencil ? m.peak_error_deg : std::numeric_limits<double>::quiet_NaN();
    s->footprint_x = m.footprint_peak.x;
    s->footprint_y = m.footprint_peak.y;
    s->footprint_error_m = m.footprint_target ? m.footprint_error_m : std::numeric_limits<double>::quiet_NaN();
}

void clear(spss_summary* s)
{
    if (!s) return;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    *s = spss_summary{0, nan, nan, nan, nan, nan, nan, nan, 0, nan, nan, -1};
}

void require(const void* p, const char* what)
{
    if (!p) throw spss::Error(spss::Errc::invalid_argument, std::string(what) + " is NULL");
}

} // namespace

extern "C" {

const char* spss_version(void) { return "1.0.0"; }

const char* spss_last_error(void) { return g_last_error.c_str(); }

spss_status spss_scenario_load(const char* config_path, spss_scenario** out)
{
    return guarded([&] {
        require(config_path, "config path");
        require(out, "output handle");
        *out = nullptr;
        auto h = std::make_unique<spss_scenario>();
        h->scn = spss::load_scenario(config_path);
        *out = h.release();
    });
}

spss_status spss_scenario_override_seeds(spss_scenario* scn, uint64_t seed)
{
    return guarded([&] {
        require(scn, "scenario");
        scn->scn.override_seeds(seed);
    });
}

const char* spss_scenario_hash(const spss_scenario* scn) { return scn ? scn->scn.hash.c_str() : ""; }

void spss_scenario_free(spss_scenario* scn) { delete scn; }

spss_status spss_train(const spss_scenario* scn, const char* out_dir, spss_model** model, spss_train_summary* summary)
{
    return guarded([&] {
        require(scn, "scenario");
        require(out_dir, "output directory");
        if (model) *model = nullptr;
        auto t = spss::pipeline::train(scn->scn);
        spss::pipeline::write_training(out_dir, scn->scn, t);
        if (summary) {
            const auto& f = t.model.summary();
            *summary = spss_train_summary{f.records, f.duplicates, f.max_interp_error, f.c_min, f.c_max, f.max_nugget};
        }
        if (model) {
            auto h = std::make_unique<spss_model>();
            h->twin = std::make_shared<spss::surrogate::KrigingModel>(std::move(t.model));
            *model = h.release();
        }
    });
}

spss_status spss_model_load(const spss_scenario* scn, const char* model_path, spss_model** out)
{
    return guarded([&] {
        require(scn, "scenario");
        require(out, "output handle");
        *out = nullptr;
        std::optional<std::filesystem::path> path;
        if (model_path) path = model_path;
        auto h = std::make_unique<spss_model>();
        h->twin = spss::pipeline::make_twin(scn->scn, path);
        *out = h.release();
    });
}

void spss_model_free(spss_model* model) { delete model; }

spss_status spss_synthesize(const spss_scenario* scn, const spss_model* model, const char* out_dir,
                            spss_summary* summary)
{
    clear(summary);
    return guarded([&] {
        require(scn, "scenario");
        require(model, "model");
        require(out_dir, "output directory");
        const auto r = spss::pipeline::synthesize(scn->scn, *model->twin);
        spss::pipeline::write_artifacts(out_dir, "synthesize", scn->scn, spss::pipeline::report_artifacts(scn->scn, r));
        fill(summary, r.achieved.metrics);
        if (summary) {
            summary->ipt_iterations = r.ipt.iterations_run;
            summary->gamma_final = r.ipt.gamma_history.back();
            summary->delta_final = r.pso.best_value;
        }
    });
}

spss_status spss_evaluate(const spss_scenario* scn, const spss_model* model, const char* layout_csv,
                          const char* out_dir, spss_summary* summary)
{
    clear(summary);
    return guarded([&] {
        require(scn, "scenario");
        require(model, "model");
        require(layout_csv, "layout path");
        require(out_dir, "output directory");
        const std::filesystem::path layout(layout_csv);
        if (!std::filesystem::exists(layout)) throw spss::Error(spss::Errc::data, "layout file not found: " + layout.string());
        int match = -1;
        const auto manifest = layout.parent_path() / "manifest.json";
        if (std::filesystem::exists(manifest)) {
            const auto m = nlohmann::json::parse(spss::io::read_file(manifest), nullptr, false);
            if (!m.is_discarded() && m.contains("config_hash") && m["config_hash"].is_string())
                match = m["config_hash"].get<std::string>() == scn->scn.hash ? 1 : 0;
        }
        const auto g = spss::pipeline::read_layout(layout, scn->scn);
        const auto e = spss::pipeline::evaluate_layout(scn->scn, *model->twin, g);
        spss::pipeline::write_artifacts(out_dir, "evaluate", scn->scn, spss::pipeline::evaluation_artifacts(scn->scn, e));
        fill(summary, e.metrics);
        if (summary) summary->config_hash_match = match;
    });
}

spss_status spss_footprint(const spss_scenario* scn, const spss_model* model, const char* layout_csv,
                           const char* out_dir, spss_summary* summary)
{
    clear(summary);
    return guarded([&] {
        require(scn, "scenario");
        require(out_dir, "output directory");
        if (layout_csv) {
            require(model, "model");
            const auto g = spss::pipeline::read_layout(layout_csv, scn->scn);
            const auto e = spss::pipeline::evaluate_layout(scn->scn, *model->twin, g);
            spss::pipeline::write_artifacts(out_dir, "footprint", scn->scn,
                                            spss::pipeline::evaluation_artifacts(scn->scn, e));
            fill(summary, e.metrics);
        } else {
            const auto r = spss::pipeline::reference_currents(scn->scn);
            const auto e = spss::pipeline::evaluate_currents(scn->scn, r.j_opt);
            auto files = spss::pipeline::evaluation_artifacts(scn->scn, e);
            files["gamma_trace.csv"] = spss::pipeline::trace_csv("gamma", r.gamma_history);
            spss::pipeline::write_artifacts(out_dir, "footprint", scn->scn, files);
            fill(summary, e.metrics);
            if (summary) {
                summary->ipt_iterations = r.iterations_run;
                summary->gamma_final = r.gamma_history.back();
            }
        }
    });
}

spss_status spss_report(const char* dir, const char* out_dir, spss_summary* summary)
{
    clear(summary);
    return guarded([&] {
        require(dir, "directory");
        const std::filesystem::path d(dir);
        const auto manifest = spss::pipeline::verify_manifest(d);
        if (!std::filesystem::exists(d / "report.json"))
            throw spss::Error(spss::Errc::data, "no report.json in " + d.string());
        nlohmann::json rep;
        try {
            rep = nlohmann::json::parse(spss::io::read_file(d / "report.json"));
        } catch (const nlohmann::json::exception& e) {
            throw spss::Error(spss::Errc::data, std::string("malformed report.json: ") + e.what());
        }
        nlohmann::json index;
        index["config_hash"] = manifest.value("config_hash", "");
        index["metrics"] = rep.value("achieved", nlohmann::json::object());
        nlohmann::json tables = nlohmann::json::array();
        for (const auto& [name, hash] : manifest.at("artifacts").items()) {
            if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
            const auto t = spss::io::read_csv(d / name);
            tables.push_back({{"file", name}, {"columns", t.header}, {"rows", t.rows.size()}, {"hash", hash}});
        }
        index["tables"] = std::move(tables);
        const std::filesystem::path out = out_dir ? std::filesystem::path(out_dir) : d;
        spss::io::write_file(out / "index.json", index.dump(2) + "\n");
        if (summary) {
            try {
                const auto& a = rep.at("achieved");
                summary->pencil = a.at("objective") == "pencil" ? 1 : 0;
                summary->xi_db = a.at(summary->pencil ? "xi_pen_db" : "xi_sha_db").get<double>();
                summary->peak_theta_deg = a.at("peak_direction").at("theta_deg").get<double>();
                summary->peak_phi_deg = a.at("peak_direction").at("phi_deg").get<double>();
                if (summary->pencil) summary->peak_error_deg = a.at("peak_error_deg").get<double>();
                summary->footprint_x = a.at("footprint_peak").at("x").get<double>();
                summary->footprint_y = a.at("footprint_peak").at("y").get<double>();
                if (a.contains("footprint_error_m")) summary->footprint_error_m = a["footprint_error_m"].get<double>();
                summary->ipt_iterations = rep.at("ipt").at("iterations").get<int>();
                summary->gamma_final = rep.at("ipt").at("gamma_final").get<double>();
                summary->delta_final = rep.at("sbd").at("delta_final").get<double>();
            } catch (const nlohmann::json::exception& e) {
                throw spss::Error(spss::Errc::data, std::string("report.json lacks a field: ") + e.what());
            }
        }
    });
}

spss_status spss_set_threads(int threads)
{
    return guarded([&] {
        if (threads < 1) throw spss::Error(spss::Errc::config, "--threads must be at least 1");
#ifdef _OPENMP
        omp_set_num_threads(threads);
#endif
    });
}

spss_status spss_footprint_point(double theta_deg, double phi_deg, double height, double* x, double* y)
{
    return guarded([&] {
        require(x, "x");
        require(y, "y");
        spss::em::Mounting m;
        m.height = height;
        m.validate();
        const auto g = spss::em::footprint_point(spss::em::Direction::from_degrees(theta_deg, phi_deg), m);
        *x = g.x;
        *y = g.y;
    });
}

} // extern "C"
