#pragma once

#include <string>
#include <vector>

namespace vibrotherm::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
    bool markers = false;
};

struct Axes {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
};

std::string line_plot(const std::vector<Series>& series, const Axes& axes);

// values row-major over (y rows, x columns); NaN cells are drawn grey
std::string heatmap(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& values,
                    const Axes& axes, bool log_color = true);

} // namespace vibrotherm::svg
