#pragma once

// Minimal CSV I/O. Numbers are written in the shortest decimal form that
// reads back to the same double, with '.' as separator and '\n' line ends.

#include "enki/linalg.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace enki::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

[[nodiscard]] std::string format_number(double value);
/// Parses a number written by format_number (also "nan", "inf", "-inf").
[[nodiscard]] double parse_number(std::string_view text);

void write_table(const std::filesystem::path& path, const Table& table);
[[nodiscard]] Table read_table(const std::filesystem::path& path);

/// One value per line, no header.
void write_vector(const std::filesystem::path& path, const Vector& v);
[[nodiscard]] Vector read_vector(const std::filesystem::path& path);

}  // namespace enki::csv
