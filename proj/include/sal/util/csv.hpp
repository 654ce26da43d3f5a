#pragma once

// Minimal RFC-4180 CSV emission: comma separated, '.' decimal separator,
// LF line endings, shortest round-trip float formatting so equal inputs
// always serialize to identical bytes.

#include "sal/common.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace sal {

inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    require(ec == std::errc(), "format_double: conversion failed");
    return std::string(buf, ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path, std::ios::binary) {
        require(out_.good(), "CsvWriter: cannot open " + path.string());
        columns_ = header.size();
        write_row_strings(header);
    }

    void row(const std::vector<std::string>& cells) { write_row_strings(cells); }

    template <typename... Ts>
    void row_values(const Ts&... values) {
        std::vector<std::string> cells;
        cells.reserve(sizeof...(values));
        (cells.push_back(to_cell(values)), ...);
        write_row_strings(cells);
    }

private:
    static std::string to_cell(double v) { return format_double(v); }
    static std::string to_cell(int v) { return std::to_string(v); }
    static std::string to_cell(long v) { return std::to_string(v); }
    static std::string to_cell(std::size_t v) { return std::to_string(v); }
    static std::string to_cell(const std::string& v) { return v; }
    static std::string to_cell(const char* v) { return v; }

    void write_row_strings(const std::vector<std::string>& cells) {
        require(cells.size() == columns_, "CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            write_escaped(cells[i]);
        }
        out_ << '\n';
    }

    void write_escaped(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) {
            out_ << s;
            return;
        }
        out_ << '"';
        for (char c : s) {
            if (c == '"') out_ << '"';
            out_ << c;
        }
        out_ << '"';
    }

    std::ofstream out_;
    std::size_t columns_ = 0;
};

}  // namespace sal
