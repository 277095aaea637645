#pragma once

#include <string>
#include <vector>

namespace straintomo {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  bool markers_only = false;
};

/// Standalone SVG line chart; non-finite points (or non-positive ones on a
/// log axis) are skipped.
std::string line_plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace straintomo
