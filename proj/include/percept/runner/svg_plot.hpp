#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace percept::runner {

/// Minimal self-contained SVG line plots (no external assets).
struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
};

struct SvgPlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    std::vector<std::array<double, 2>> markers; // filled points
    std::vector<double> hlines;                 // dashed horizontal guides

    void write(const std::filesystem::path& path) const;
};

} // namespace percept::runner
