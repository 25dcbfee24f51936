#pragma once

#include <string>
#include <vector>

#include "deepritz/geometry.hpp"
#include "deepritz/network.hpp"

namespace deepritz::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

/// Standalone SVG document. Non-finite or (on log axes) nonpositive points
/// are dropped.
std::string render_line_plot(const LinePlot& plot);

/// Heatmap of a 2D network on a resolution x resolution grid over the
/// domain's bounding box; cells outside the domain are left blank.
std::string render_heatmap(const Network& net, const Domain& domain, int resolution = 200,
                           const std::string& title = "");

}  // namespace deepritz::cli
