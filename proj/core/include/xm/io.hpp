#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xm/dense.hpp"

namespace xm {

// Shortest round-trip decimal form of a double. Output files are rebuilt
// from the same doubles on every run, so this keeps them byte-identical.
std::string format_double(double x);

std::uint64_t fnv1a64(std::string_view bytes);

// CSV with one header row; fields are never quoted, so header names must not
// contain commas.
void write_csv(std::ostream& out, std::span<const std::string> header, const Matrix& values);
std::string csv_to_string(std::span<const std::string> header, const Matrix& values);

struct CsvTable {
    std::vector<std::string> header;
    Matrix values;
};

// Reads a numeric CSV; a non-numeric first row is treated as the header.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace xm
