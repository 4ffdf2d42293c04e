#pragma once

// Minimal static SVG line charts.

#include <string>
#include <vector>

namespace vnslab {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Points with non-finite coordinates (or non-positive ones on a log axis) are skipped.
std::string svg_line_chart(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace vnslab
