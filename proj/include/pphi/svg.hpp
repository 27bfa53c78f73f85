#pragma once

#include <string>
#include <vector>

namespace pphi {

enum class PlotKind { Scatter, Histogram, Line };

struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string x_label;
    std::string y_label;
    std::string title;
};

// Writes a self-contained SVG; byte-identical output for identical input.
// Histogram interprets (x, y) as bin centers and heights.
void emit_plot(const PlotSeries& data, PlotKind kind, const std::string& path);

} // namespace pphi
