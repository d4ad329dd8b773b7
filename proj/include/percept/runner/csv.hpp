#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace percept::runner {

/// Doubles serialized with 17 significant digits so files re-parse to the
/// exact bit pattern.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    void add_row(std::vector<std::string> values);
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

} // namespace percept::runner
