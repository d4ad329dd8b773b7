#include "percept/runner/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "percept/errors.hpp"

namespace percept::runner {

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kLeft = 64.0, kRight = 20.0, kTop = 36.0, kBottom = 48.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finalize() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

} // namespace

void SvgPlot::write(const std::filesystem::path& path) const {
    Range rx, ry;
    for (const PlotSeries& s : series) {
        for (double v : s.x) rx.include(v);
        for (double v : s.y) ry.include(v);
    }
    for (const auto& m : markers) {
        rx.include(m[0]);
        ry.include(m[1]);
    }
    for (double h : hlines) ry.include(h);
    rx.finalize();
    ry.finalize();

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * plot_w; };
    auto py = [&](double v) { return kTop + (ry.hi - v) / (ry.hi - ry.lo) * plot_h; };

    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#444\"/>\n";

    // Ticks and grid.
    const int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double tx = rx.lo + (rx.hi - rx.lo) * i / n_ticks;
        const double ty = ry.lo + (ry.hi - ry.lo) * i / n_ticks;
        out << "<line x1=\"" << px(tx) << "\" y1=\"" << kTop << "\" x2=\"" << px(tx)
            << "\" y2=\"" << kTop + plot_h << "\" stroke=\"#eee\"/>\n";
        out << "<line x1=\"" << kLeft << "\" y1=\"" << py(ty) << "\" x2=\"" << kLeft + plot_w
            << "\" y2=\"" << py(ty) << "\" stroke=\"#eee\"/>\n";
        out << "<text x=\"" << px(tx) << "\" y=\"" << kTop + plot_h + 16
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
            << fmt(tx) << "</text>\n";
        out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(ty) + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(ty)
            << "</text>\n";
    }

    for (double h : hlines)
        out << "<line x1=\"" << kLeft << "\" y1=\"" << py(h) << "\" x2=\"" << kLeft + plot_w
            << "\" y2=\"" << py(h)
            << "\" stroke=\"#888\" stroke-dasharray=\"6,4\"/>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
            out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i])) << ' ';
        out << "\"/>\n";
        if (!s.label.empty())
            out << "<text x=\"" << kLeft + plot_w - 8 << "\" y=\"" << kTop + 16 + 16 * si
                << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\" fill=\""
                << color << "\">" << s.label << "</text>\n";
    }

    for (const auto& m : markers)
        out << "<circle cx=\"" << px(m[0]) << "\" cy=\"" << py(m[1])
            << "\" r=\"4\" fill=\"#d62728\" stroke=\"white\"/>\n";

    if (!title.empty())
        out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" font-family=\"sans-serif\" "
               "font-size=\"15\" text-anchor=\"middle\">"
            << title << "</text>\n";
    if (!x_label.empty())
        out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
            << x_label << "</text>\n";
    if (!y_label.empty())
        out << "<text x=\"16\" y=\"" << kTop + plot_h / 2
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
               "transform=\"rotate(-90 16 "
            << kTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

    out << "</svg>\n";
    if (!out) throw Error("failed writing " + path.string());
}

} // namespace percept::runner
