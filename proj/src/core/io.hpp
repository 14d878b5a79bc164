// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace spss::io {

// %.17g, round-trips every double.
std::string fmt(double x);

std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t h);

std::string read_file(const std::filesystem::path& file);
// Writes through a temporary and renames into place.
void write_file(const std::filesystem::path& file, std::string_view content);

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header);

    CsvWriter& operator<<(double x);
    CsvWriter& operator<<(long long x);
    CsvWriter& operator<<(int x) { return *this << static_cast<long long>(x); }
    CsvWriter& operator<<(const std::string& s);
    void end_row();

    const std::string& str() const { return buf_; }

private:
    void sep();

    std::string buf_;
    std::size_t columns_;
    std::size_t col_ = 0;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

// Numeric CSV with a header line. Throws Errc::data naming the offending
// line on ragged rows or unparsable cells.
CsvTable read_csv(const std::filesystem::path& file);

} // namespace spss::io
