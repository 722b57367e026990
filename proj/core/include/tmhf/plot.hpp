#pragma once

// Minimal SVG line and scatter charts for run directories.

#include <filesystem>
#include <string>
#include <vector>

#include "tmhf/diagnostics.hpp"
#include "tmhf/trace.hpp"

namespace tmhf {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool points = false;  // markers instead of a polyline
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<Series> overlay;  // drawn first, in light grey
};

std::string render_svg(const Chart& chart, int width = 720, int height = 480);

struct PlotResult {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;
};

/// energy.svg, z.svg, path.svg, tracking.svg and, when the fit applies, lojasiewicz.svg.
PlotResult emit_plots(const std::filesystem::path& dir, const std::vector<TraceRecord>& records,
                      const LojasiewiczFit& fit);

}  // namespace tmhf
