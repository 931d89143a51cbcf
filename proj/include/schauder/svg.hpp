#pragma once

#include <string>
#include <vector>

namespace schauder {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
};

/// Static SVG line plot with markers. Non-positive values are skipped on log axes.
std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace schauder
