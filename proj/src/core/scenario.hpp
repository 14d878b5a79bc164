// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipt.hpp"
#include "sbd.hpp"

namespace spss {

enum class TwinKind { kriging, oracle };
enum class PsoInit { random, lookup };

struct Objective {
    enum class Kind { pencil, shaped } kind = Kind::pencil;
    em::Direction target;                     // pencil
    std::vector<radiation::Polygon> polygons; // shaped, ground coordinates
};

struct OutputSettings {
    double oversampling = 4.0;
    bool strict_nyquist = false;
    radiation::GroundWindow window;
    radiation::Spreading spreading = radiation::Spreading::none;
};

struct Scenario {
    em::PlaneWave wave;
    em::Lattice lattice;
    em::Mounting mount;

    surrogate::Bounds bounds;
    surrogate::OracleParams oracle;

    int Pp = 5;
    int Qp = 5;
    int B = 500;
    std::uint64_t surrogate_seed = 0;
    TwinKind twin = TwinKind::kriging;
    surrogate::KrigingConfig kriging;

    ipt::IptConfig ipt;
    double mask_db = 0.0;

    sbd::SbdConfig sbd;
    PsoInit pso_init = PsoInit::random;

    Objective objective;
    OutputSettings output;

    nlohmann::json document; // normalised config as parsed
    std::string hash;        // FNV-1a of the normalised document

    void override_seeds(std::uint64_t seed);
};

// Strict parse: unknown keys and missing seeds are config errors.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& file);

} // namespace spss
