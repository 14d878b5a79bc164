// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "scenario.hpp"

namespace spss::pipeline {

struct TrainArtifacts {
    surrogate::TrainingSet set;
    surrogate::KrigingModel model;
};

TrainArtifacts train(const Scenario& scn);

// Throws Errc::mismatch when the model was trained for another scenario.
void check_model(const Scenario& scn, const surrogate::KrigingModel& model);

// The twin named by the scenario; kriging twins load and check `model`.
std::shared_ptr<const surrogate::WindowPredictor> make_twin(const Scenario& scn,
                                                            const std::optional<std::filesystem::path>& model);

struct PatternMetrics {
    bool pencil = true;
    double xi_db = 0.0;
    em::Direction peak;
    double peak_error_deg = 0.0;         // pencil only
    em::GroundPoint footprint_peak;
    std::optional<em::GroundPoint> footprint_target; // pencil only, if it reaches the ground
    double footprint_error_m = 0.0;
    bool nyquist_ok = true;
};

struct Evaluation {
    gstc::SurfaceCurrentField currents;
    radiation::FarFieldGrid far;
    radiation::FootprintMap footprint;
    PatternMetrics metrics;
};

// Far field on the output grid, footprint and figures of merit.
Evaluation evaluate_currents(const Scenario& scn, const gstc::SurfaceCurrentField& currents);

// Coverage mask used by IPT (Nyquist grid) and by the shaped directivity
// (output grid).
radiation::CoverageMask ipt_mask(const Scenario& scn);

struct SynthesisReport {
    ipt::IptResult ipt;
    mapping::LayoutDescriptors layout;
    sbd::PsoResult pso;
    Evaluation reference;
    Evaluation achieved;
};

ipt::IptResult reference_currents(const Scenario& scn);

// Per-cell best match on the uniform-layout response curve; D = 1 only.
mapping::LayoutDescriptors lookup_layout(const Scenario& scn, const surrogate::WindowPredictor& twin,
                                         const gstc::SurfaceCurrentField& j_ref, int samples = 401);

SynthesisReport synthesize(const Scenario& scn, const surrogate::WindowPredictor& twin);

Evaluation evaluate_layout(const Scenario& scn, const surrogate::WindowPredictor& twin,
                           const mapping::LayoutDescriptors& g);

// Artifact writers. Each output directory also gets manifest.json.
std::string layout_csv(const mapping::LayoutDescriptors& g);
mapping::LayoutDescriptors read_layout(const std::filesystem::path& file, const Scenario& scn);
std::string currents_csv(const gstc::SurfaceCurrentField& j);
std::string farfield_csv(const radiation::FarFieldGrid& far);
std::string footprint_csv(const radiation::FootprintMap& map);
std::string trace_csv(const std::string& name, const std::vector<double>& trace);
nlohmann::json metrics_json(const PatternMetrics& m);

using Artifacts = std::map<std::string, std::string>; // file name -> content

// Writes every artifact plus manifest.json (hashes, config hash, timestamp).
void write_artifacts(const std::filesystem::path& dir, const std::string& command, const Scenario& scn,
                     const Artifacts& files);

void write_training(const std::filesystem::path& dir, const Scenario& scn, const TrainArtifacts& t);
Artifacts report_artifacts(const Scenario& scn, const SynthesisReport& r);
Artifacts evaluation_artifacts(const Scenario& scn, const Evaluation& e);

// Re-hashes the artifacts listed in dir/manifest.json; throws Errc::data on
// any mismatch. Returns the manifest.
nlohmann::json verify_manifest(const std::filesystem::path& dir);

} // namespace spss::pipeline
