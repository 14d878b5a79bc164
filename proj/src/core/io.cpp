// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 spss-synth contributors

#include "io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace spss::io {

std::string fmt(double x)
{
    char buf[32];
    const int n = std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf, static_cast<std::size_t>(n));
}

std::uint64_t fnv1a(std::string_view data, std::uint64_t h)
{
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot open " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& file, std::string_view content)
{
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::filesystem::path tmp = file;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::io, "cannot write " + file.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(Errc::io, "short write to " + file.string());
    }
    std::filesystem::rename(tmp, file);
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += header[i];
    }
    buf_ += '\n';
}

void CsvWriter::sep()
{
    if (col_ >= columns_) throw Error(Errc::invalid_argument, "too many CSV cells in a row");
    if (col_++) buf_ += ',';
}

CsvWriter& CsvWriter::operator<<(double x)
{
    sep();
    buf_ += fmt(x);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long long x)
{
    sep();
    buf_ += std::to_string(x);
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s)
{
    sep();
    buf_ += s;
    return *this;
}

void CsvWriter::end_row()
{
    if (col_ != columns_) throw Error(Errc::invalid_argument, "short CSV row");
    buf_ += '\n';
    col_ = 0;
}

namespace {

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

CsvTable read_csv(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) throw Error(Errc::data, "cannot open " + file.string());
    CsvTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view l = trim(line);
        if (l.empty()) continue;
        const auto cells = split(l);
        if (t.header.empty()) {
            for (auto c : cells) t.header.emplace_back(trim(c));
            continue;
        }
        if (cells.size() != t.header.size())
            throw Error(Errc::data, file.filename().string() + " line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(t.header.size()) + " columns, found " +
                                        std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string_view c = trim(cells[i]);
            const auto res = std::from_chars(c.data(), c.data() + c.size(), row[i]);
            if (res.ec != std::errc() || res.ptr != c.data() + c.size())
                throw Error(Errc::data, file.filename().string() + " line " + std::to_string(lineno) +
                                            ": cannot parse '" + std::string(c) + "' in column " + t.header[i]);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.header.empty()) throw Error(Errc::data, file.string() + " is empty");
    return t;
}

} // namespace spss::io
