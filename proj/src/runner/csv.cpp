#include "percept/runner/csv.hpp"

#include <cstdio>
#include <fstream>

#include "percept/errors.hpp"

namespace percept::runner {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

void CsvTable::add_row(std::vector<std::string> values) { rows.push_back(std::move(values)); }

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

} // namespace percept::runner
