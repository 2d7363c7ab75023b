#pragma once

#include <string>
#include <vector>

namespace prefdiff {

// Self-contained SVG line plots: hand-built axes, ticks and polylines, no
// renderer dependency. Output is deterministic for identical input.
struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<Series>& series);

void write_line_plot(const std::string& path, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series);

}  // namespace prefdiff
