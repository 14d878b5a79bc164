// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <stdexcept>
#include <string>

namespace spss {

// Failure kinds raised by the library. The C API folds them into the
// process-level status codes (see status_of()).
enum class Errc {
    invalid_argument,
    config,               // schema / validation failure
    training,             // surrogate fit failure
    mismatch,             // scenario vs model mismatch, missing model
    data,                 // malformed or mis-sized data files
    io,
    no_ground_intersection,
    singular_mapping,
    singular_inverse,
    grid_too_coarse,
    degenerate_operator,
    ill_conditioned,
    unsupported,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

const char* errc_name(Errc code) noexcept;

// Exit-code style status: 0 ok, 2 config, 3 training, 4 scenario/model
// mismatch, 5 data mismatch, 1 anything else.
int status_of(Errc code) noexcept;

} // namespace spss
