// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "error.hpp"

namespace spss {

const char* errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::config: return "ConfigError";
    case Errc::training: return "TrainingError";
    case Errc::mismatch: return "ScenarioModelMismatch";
    case Errc::data: return "DataMismatch";
    case Errc::io: return "IoError";
    case Errc::no_ground_intersection: return "NoGroundIntersection";
    case Errc::singular_mapping: return "SingularMapping";
    case Errc::singular_inverse: return "SingularInverse";
    case Errc::grid_too_coarse: return "GridTooCoarse";
    case Errc::degenerate_operator: return "DegenerateOperator";
    case Errc::ill_conditioned: return "IllConditioned";
    case Errc::unsupported: return "Unsupported";
    }
    return "Unknown";
}

int status_of(Errc code) noexcept
{
    switch (code) {
    case Errc::config: return 2;
    case Errc::training:
    case Errc::ill_conditioned: return 3;
    case Errc::mismatch: return 4;
    case Errc::data: return 5;
    default: return 1;
    }
}

} // namespace spss
