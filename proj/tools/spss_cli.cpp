// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spss.h"

namespace {

struct Options {
    std::string config;
    std::string model;
    std::string out;
    std::string layout;
    std::string dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
};

int report_error(spss_status s)
{
    std::fprintf(stderr, "spss-cli: %s\n", spss_last_error());
    return static_cast<int>(s);
}

void print_value(const char* key, double v)
{
    if (std::isnan(v)) return;
    std::printf("%s %.17g\n", key, v);
}

void print_summary(const spss_summary& s)
{
    std::printf("objective %s\n", s.pencil ? "pencil" : "shaped");
    print_value(s.pencil ? "xi_pen_db" : "xi_sha_db", s.xi_db);
    print_value("peak_theta_deg", s.peak_theta_deg);
    print_value("peak_phi_deg", s.peak_phi_deg);
    print_value("peak_error_deg", s.peak_error_deg);
    print_value("footprint_x_m", s.footprint_x);
    print_value("footprint_y_m", s.footprint_y);
    print_value("footprint_error_m", s.footprint_error_m);
    if (s.ipt_iterations > 0) {
        std::printf("ipt_iterations %d\n", s.ipt_iterations);
        print_value("gamma_final", s.gamma_final);
    }
    print_value("delta_final", s.delta_final);
}

// Scenario handle released on scope exit.
struct ScenarioGuard {
    spss_scenario* h = nullptr;
    ~ScenarioGuard() { spss_scenario_free(h); }
};

struct ModelGuard {
    spss_model* h = nullptr;
    ~ModelGuard() { spss_model_free(h); }
};

spss_status open_scenario(const Options& o, ScenarioGuard& scn)
{
    spss_status s = spss_set_threads(o.threads);
    if (s != SPSS_OK) return s;
    s = spss_scenario_load(o.config.c_str(), &scn.h);
    if (s != SPSS_OK) return s;
    if (o.seed) s = spss_scenario_override_seeds(scn.h, *o.seed);
    return s;
}

spss_status open_model(const Options& o, const ScenarioGuard& scn, ModelGuard& model)
{
    return spss_model_load(scn.h, o.model.empty() ? nullptr : o.model.c_str(), &model.h);
}

int run_train(const Options& o)
{
    ScenarioGuard scn;
    if (auto s = open_scenario(o, scn); s != SPSS_OK) return report_error(s);
    spss_train_summary t{};
    if (auto s = spss_train(scn.h, o.out.c_str(), nullptr, &t); s != SPSS_OK) return report_error(s);
    std::printf("model %s/model.json\n", o.out.c_str());
    std::printf("config_hash %s\n", spss_scenario_hash(scn.h));
    std::printf("records %d\n", t.records);
    std::printf("duplicates_merged %d\n", t.duplicates);
    std::printf("max_interp_error %.17g\n", t.max_interp_error);
    std::printf("c_min %.17g\n", t.c_min);
    std::printf("c_max %.17g\n", t.c_max);
    std::printf("max_nugget %.17g\n", t.max_nugget);
    return 0;
}

int run_synthesize(const Options& o)
{
    ScenarioGuard scn;
    ModelGuard model;
    if (auto s = open_scenario(o, scn); s != SPSS_OK) return report_error(s);
    if (auto s = open_model(o, scn, model); s != SPSS_OK) return report_error(s);
    spss_summary sum;
    if (auto s = spss_synthesize(scn.h, model.h, o.out.c_str(), &sum); s != SPSS_OK) return report_error(s);
    print_summary(sum);
    return 0;
}

int run_evaluate(const Options& o)
{
    ScenarioGuard scn;
    ModelGuard model;
    if (auto s = open_scenario(o, scn); s != SPSS_OK) return report_error(s);
    if (auto s = open_model(o, scn, model); s != SPSS_OK) return report_error(s);
    spss_summary sum;
    if (auto s = spss_evaluate(scn.h, model.h, o.layout.c_str(), o.out.c_str(), &sum); s != SPSS_OK)
        return report_error(s);
    if (sum.config_hash_match == 0)
        std::fprintf(stderr, "spss-cli: warning: the layout was produced under a different config hash\n");
    print_summary(sum);
    return 0;
}

int run_footprint(const Options& o)
{
    ScenarioGuard scn;
    ModelGuard model;
    if (auto s = open_scenario(o, scn); s != SPSS_OK) return report_error(s);
    if (!o.layout.empty())
        if (auto s = open_model(o, scn, model); s != SPSS_OK) return report_error(s);
    spss_summary sum;
    const char* layout = o.layout.empty() ? nullptr : o.layout.c_str();
    if (auto s = spss_footprint(scn.h, model.h, layout, o.out.c_str(), &sum); s != SPSS_OK) return report_error(s);
    print_summary(sum);
    return 0;
}

int run_report(const Options& o)
{
    if (auto s = spss_set_threads(o.threads); s != SPSS_OK) return report_error(s);
    spss_summary sum;
    const char* out = o.out.empty() ? nullptr : o.out.c_str();
    if (auto s = spss_report(o.dir.c_str(), out, &sum); s != SPSS_OK) return report_error(s);
    print_summary(sum);
    return 0;
}

void add_common(CLI::App* cmd, Options& o, bool config, bool model)
{
    if (config) cmd->add_option("--config", o.config, "Scenario config (JSON)")->required()->check(CLI::ExistingFile);
    if (model) cmd->add_option("--model", o.model, "Trained surrogate (model.json)");
    cmd->add_option("--seed-override", o.seed, "Replace every seed in the config");
    cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Static passive smart-skin layout synthesis"};
    app.set_version_flag("--version", std::string(spss_version()));
    app.require_subcommand(1);
    Options o;

    auto* train = app.add_subcommand("train", "Build the training set and fit the surrogate");
    add_common(train, o, true, false);
    train->add_option("--out", o.out, "Output directory")->required();

    auto* synth = app.add_subcommand("synthesize", "Reference currents, then layout optimisation");
    add_common(synth, o, true, true);
    synth->add_option("--out", o.out, "Report directory")->required();

    auto* eval = app.add_subcommand("evaluate", "Re-evaluate a saved layout");
    add_common(eval, o, true, true);
    eval->add_option("layout", o.layout, "layout.csv")->required();
    eval->add_option("--out", o.out, "Output directory")->required();

    auto* foot = app.add_subcommand("footprint", "Ground footprint of a layout or of the reference currents");
    add_common(foot, o, true, true);
    foot->add_option("layout", o.layout, "layout.csv (omit for the reference currents)");
    foot->add_option("--out", o.out, "Output directory")->required();

    auto* rep = app.add_subcommand("report", "Verify a report directory and write index.json");
    add_common(rep, o, false, false);
    rep->add_option("dir", o.dir, "Report directory")->required()->check(CLI::ExistingDirectory);
    rep->add_option("--out", o.out, "Directory for index.json (default: the report directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return SPSS_ERR_CONFIG;
    }

    if (*train) return run_train(o);
    if (*synth) return run_synthesize(o);
    if (*eval) return run_evaluate(o);
    if (*foot) return run_footprint(o);
    return run_report(o);
}
