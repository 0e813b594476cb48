#pragma once

#include "dhc/loadflow/sweep.hpp"

#include <string>
#include <vector>

namespace dhc::io {

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
    int marker = -1;  ///< index of a point drawn with a star, -1 for none
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
};

/// Self-contained SVG with axes, ticks and a legend.
std::string svg_line_chart(const LineChart& chart);

/// Admissible / violation / non-converged cells of a sweep raster.
std::string svg_raster(const lf::SweepRaster& raster);

}  // namespace dhc::io
