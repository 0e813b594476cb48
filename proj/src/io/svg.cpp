#include "dhc/io/svg.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dhc::io {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 190.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// 1-2-5 tick spacing giving about `count` intervals.
double tick_step(double span, int count) {
    const double raw = span / count;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= f * mag) return f * mag;
    }
    return 10.0 * mag;
}

}  // namespace

std::string svg_line_chart(const LineChart& chart) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : chart.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    if (!std::isfinite(x0)) {
        x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
    }
    if (x1 <= x0) x1 = x0 + 1.0;
    if (y1 <= y0) y1 = y0 + 1.0;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto X = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return kTop + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    out += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       kLeft + pw / 2, escape(chart.title));
    out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft,
                       kTop, pw, ph);
    const double xs = tick_step(x1 - x0, 8);
    for (double t = std::ceil(x0 / xs) * xs; t <= x1 + 1e-9 * xs; t += xs) {
        out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>"
                           "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:g}</text>\n",
                           X(t), kTop, kTop + ph, kTop + ph + 16, std::abs(t) < 1e-12 * xs ? 0.0 : t);
    }
    const double ys = tick_step(y1 - y0, 6);
    for (double t = std::ceil(y0 / ys) * ys; t <= y1 + 1e-9 * ys; t += ys) {
        out += fmt::format("<line x1=\"{1}\" y1=\"{0:.2f}\" x2=\"{2}\" y2=\"{0:.2f}\" stroke=\"#ddd\"/>"
                           "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:g}</text>\n",
                           Y(t), kLeft, kLeft + pw, kLeft - 6, Y(t) + 4, std::abs(t) < 1e-12 * ys ? 0.0 : t);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kHeight - 18,
                       escape(chart.x_label));
    out += fmt::format("<text transform=\"translate(20,{}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                       kTop + ph / 2, escape(chart.y_label));

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* color = kColors[k % std::size(kColors)];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                pts += fmt::format("{:.2f},{:.2f} ", X(s.x[i]), Y(s.y[i]));
            }
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n", color, pts);
        if (s.marker >= 0 && static_cast<std::size_t>(s.marker) < std::min(s.x.size(), s.y.size())) {
            const auto m = static_cast<std::size_t>(s.marker);
            out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" fill=\"{}\" font-size=\"18\">"
                               "&#9733;</text>\n",
                               X(s.x[m]), Y(s.y[m]) + 6, color);
        }
        const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
        out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>"
                           "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
                           kLeft + pw + 12, ly, kLeft + pw + 36, color, kLeft + pw + 42, ly + 4, escape(s.label));
    }
    out += "</svg>\n";
    return out;
}

std::string svg_raster(const lf::SweepRaster& raster) {
    const double cell = std::max(2.0, std::min(8.0, 480.0 / static_cast<double>(std::max(raster.rows, raster.cols))));
    const double w = cell * static_cast<double>(raster.rows) + 120.0;
    const double h = cell * static_cast<double>(raster.cols) + 80.0;
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        w, h);
    // first bus along x, second along y growing upwards
    for (std::size_t i = 0; i < raster.rows; ++i) {
        for (std::size_t j = 0; j < raster.cols; ++j) {
            const auto c = raster.at(i, j).cls;
            const char* fill = c == lf::CellClass::admissible ? "#4c9a2a" : c == lf::CellClass::violation ? "#d9d9d9" : "#222";
            out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                               60.0 + cell * static_cast<double>(i),
                               20.0 + cell * static_cast<double>(raster.cols - 1 - j), cell, cell, fill);
        }
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">p_g at node {} (MW)</text>\n",
                       60.0 + cell * static_cast<double>(raster.rows) / 2, h - 20, raster.bus_ids[0]);
    out += fmt::format("<text transform=\"translate(24,{}) rotate(-90)\" text-anchor=\"middle\">p_g at node {} (MW)"
                       "</text>\n</svg>\n",
                       20.0 + cell * static_cast<double>(raster.cols) / 2, raster.bus_ids[1]);
    return out;
}

}  // namespace dhc::io
